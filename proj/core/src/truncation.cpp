#include "l2betti/truncation.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "l2betti/errors.hpp"

namespace l2betti {

const SparseInt& Truncation::boundary_operator(int n) const {
  if (n < 1 || n > dims) throw ComputationError("dimension-out-of-range");
  return boundary[n];
}

bool Truncation::dd_is_zero() const {
  for (int n = 2; n <= dims; ++n) {
    if (boundary[n - 1].cols() == 0 || boundary[n].cols() == 0) continue;
    SparseInt prod = boundary[n - 1] * boundary[n];
    prod.prune([](int, int, std::int64_t v) { return v != 0; });
    if (prod.nonZeros() != 0) return false;
  }
  return true;
}

Rational Truncation::skeleton_mass(int n) const {
  Rational total = 0;
  if (n < 0 || n > dims) return total;
  for (const Cell& c : cells[n]) total += orbit_weight[n][c.orbit];
  return total;
}

Rational Truncation::weighted_orbit_count(int n) const {
  Rational total = 0;
  if (n < 0 || n > dims) return total;
  for (std::size_t o = 0; o < orbit_weight[n].size(); ++o) {
    if (orbit_rep[n][o] >= 0) total += Rational(1) / orbit_weight[n][o];
  }
  return total;
}

namespace {

struct EdgeEnds {
  int tail = -1;  // -1 entry of the boundary column
  int head = -1;  // +1 entry; loops leave both at -1
};

std::vector<EdgeEnds> edge_endpoints(const Truncation& t) {
  std::vector<EdgeEnds> ends(t.cell_count(1));
  const SparseInt& b = t.boundary[1];
  for (int e = 0; e < b.outerSize(); ++e) {
    for (SparseInt::InnerIterator it(b, e); it; ++it) {
      if (it.value() > 0)
        ends[e].head = static_cast<int>(it.row());
      else if (it.value() < 0)
        ends[e].tail = static_cast<int>(it.row());
    }
  }
  return ends;
}

} // namespace

std::vector<char> bfs_spanning_tree(const Truncation& t, bool reverse_ties) {
  const int nv = t.cell_count(0);
  const int ne = t.cell_count(1);
  std::vector<char> in_tree(ne, 0);
  if (nv == 0) return in_tree;

  const auto ends = edge_endpoints(t);
  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (edge, other endpoint)
  for (int e = 0; e < ne; ++e) {
    if (ends[e].tail < 0 || ends[e].head < 0) continue;  // loop: never a tree edge
    adj[ends[e].tail].push_back({e, ends[e].head});
    adj[ends[e].head].push_back({e, ends[e].tail});
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    if (reverse_ties) std::reverse(nbrs.begin(), nbrs.end());
  }

  std::vector<char> seen(nv, 0);
  for (int start = 0; start < nv; ++start) {
    if (seen[start]) continue;
    seen[start] = 1;
    std::queue<int> q;
    q.push(start);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (auto [e, w] : adj[v]) {
        if (seen[w]) continue;
        seen[w] = 1;
        in_tree[e] = 1;
        q.push(w);
      }
    }
  }
  return in_tree;
}

int component_count(const Truncation& t) {
  const int nv = t.cell_count(0);
  if (nv == 0) return 0;
  const auto ends = edge_endpoints(t);
  std::vector<int> parent(nv);
  for (int v = 0; v < nv; ++v) parent[v] = v;
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : ends) {
    if (e.tail < 0 || e.head < 0) continue;
    parent[find(e.tail)] = find(e.head);
  }
  int components = 0;
  for (int v = 0; v < nv; ++v)
    if (find(v) == v) ++components;
  return components;
}

StarCycleBases star_and_cycle_spaces(const Truncation& t, const std::vector<char>& tree_edges) {
  if (t.dims < 1) throw ComputationError("dimension-out-of-range");
  const int nv = t.cell_count(0);
  const int ne = t.cell_count(1);
  if (static_cast<int>(tree_edges.size()) != ne) throw ComputationError("invalid-tree");

  const auto ends = edge_endpoints(t);

  // The marked edges must span every component: tree-reachability from each
  // component's first vertex must cover it.
  {
    std::vector<std::vector<int>> tree_adj(nv);
    int tree_count = 0;
    for (int e = 0; e < ne; ++e) {
      if (!tree_edges[e]) continue;
      ++tree_count;
      if (ends[e].tail < 0 || ends[e].head < 0) throw ComputationError("invalid-tree");
      tree_adj[ends[e].tail].push_back(ends[e].head);
      tree_adj[ends[e].head].push_back(ends[e].tail);
    }
    std::vector<char> seen(nv, 0);
    int reached = 0;
    for (int start = 0; start < nv; ++start) {
      if (seen[start]) continue;
      std::queue<int> q;
      q.push(start);
      seen[start] = 1;
      ++reached;
      while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : tree_adj[v])
          if (!seen[w]) {
            seen[w] = 1;
            ++reached;
            q.push(w);
          }
      }
    }
    // A spanning forest has nv - #components edges; fewer means some marked
    // set fails to span, more means it has a cycle.
    if (tree_count != nv - component_count(t)) throw ComputationError("invalid-tree");
    if (reached != nv) throw ComputationError("invalid-tree");
  }

  StarCycleBases out;
  // Star basis: coboundary columns, one per vertex. Entry (e, v) is the
  // signed incidence of v in edge e, i.e. boundary[1]^T.
  out.star = SparseInt(t.boundary[1].transpose());

  // Cycle basis: for each non-tree, non-loop edge e = (a, b), the unique tree
  // path b -> a closed up by e. Loops are their own cycles.
  std::vector<std::vector<std::pair<int, int>>> tree_adj(nv);  // (edge, other)
  for (int e = 0; e < ne; ++e) {
    if (!tree_edges[e]) continue;
    tree_adj[ends[e].tail].push_back({e, ends[e].head});
    tree_adj[ends[e].head].push_back({e, ends[e].tail});
  }
  // Rooted parent pointers per component.
  std::vector<int> parent_edge(nv, -1), parent_vertex(nv, -1), depth(nv, -1);
  for (int start = 0; start < nv; ++start) {
    if (depth[start] >= 0) continue;
    depth[start] = 0;
    std::queue<int> q;
    q.push(start);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto [e, w] : tree_adj[v]) {
        if (depth[w] >= 0) continue;
        depth[w] = depth[v] + 1;
        parent_edge[w] = e;
        parent_vertex[w] = v;
        q.push(w);
      }
    }
  }

  std::vector<Eigen::Triplet<std::int64_t>> trip;
  int col = 0;
  for (int e = 0; e < ne; ++e) {
    if (tree_edges[e]) continue;
    if (ends[e].tail < 0 || ends[e].head < 0) {  // loop
      trip.emplace_back(e, col++, 1);
      continue;
    }
    std::vector<std::pair<int, std::int64_t>> entries{{e, 1}};
    int a = ends[e].tail, b = ends[e].head;
    // Walk b and a up to their common ancestor; tree edges traversed from
    // child to parent enter with the sign that closes the oriented cycle.
    auto step_up = [&](int v, std::int64_t sign) {
      const int pe = parent_edge[v];
      const std::int64_t dir = (ends[pe].head == v) ? 1 : -1;  // edge points child-ward?
      entries.push_back({pe, -sign * dir});
      return parent_vertex[v];
    };
    while (depth[b] > depth[a]) b = step_up(b, +1);
    while (depth[a] > depth[b]) a = step_up(a, -1);
    while (a != b) {
      b = step_up(b, +1);
      a = step_up(a, -1);
    }
    for (auto [row, val] : entries) trip.emplace_back(row, col, val);
    ++col;
  }
  out.cycle = SparseInt(ne, col);
  out.cycle.setFromTriplets(trip.begin(), trip.end());
  return out;
}

} // namespace l2betti
