#include "l2betti/families.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "l2betti/errors.hpp"

namespace l2betti {

namespace {

constexpr int kRadiusCap = 64;

// ---------------------------------------------------------------------------
// Generic rooted-ball builder. A family provides the root key, a neighbor
// function (key -> sorted list of (neighbor key, edge orbit)), and the vertex
// orbit map. Cells are ordered by (appearance radius, key), which makes ball
// R a sublist of ball R+1 with identical labels.
// ---------------------------------------------------------------------------

struct GraphSpec {
  std::string root = "";
  std::function<std::vector<std::pair<std::string, int>>(const std::string&)> neighbors;
  std::function<int(const std::string&)> vertex_orbit = [](const std::string&) { return 0; };
  std::vector<Rational> vertex_orbit_weights{1};
  std::vector<Rational> edge_orbit_weights;
  int radius_cap = kRadiusCap;
};

Truncation build_graph_ball(const GraphSpec& spec, int radius) {
  if (radius < 0 || radius > spec.radius_cap) throw ComputationError("expansion-unavailable");

  std::map<std::string, int> dist;
  std::vector<std::string> order;
  dist[spec.root] = 0;
  order.push_back(spec.root);
  std::vector<std::string> layer{spec.root};
  for (int r = 1; r <= radius && !layer.empty(); ++r) {
    std::set<std::string> next;
    for (const std::string& v : layer) {
      for (const auto& [w, orbit] : spec.neighbors(v)) {
        (void)orbit;
        if (!dist.count(w)) next.insert(w);
      }
    }
    layer.assign(next.begin(), next.end());
    for (const std::string& w : layer) {
      dist[w] = r;
      order.push_back(w);
    }
  }

  Truncation t;
  t.dims = 1;
  t.cells.resize(2);
  t.boundary.resize(2);
  t.interior.resize(2);
  t.orbit_weight.resize(2);
  t.orbit_rep.resize(2);

  std::map<std::string, int> index;
  for (const std::string& v : order) {
    index[v] = static_cast<int>(t.cells[0].size());
    t.cells[0].push_back({v, spec.vertex_orbit(v)});
  }

  // Unordered edges between included vertices, oriented from the (dist, key)-
  // smaller endpoint, ordered by (appearance radius, tail, head).
  struct E {
    int app;
    std::string tail, head;
    int orbit;
  };
  std::vector<E> edges;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<int> degree_total(order.size(), 0), degree_in(order.size(), 0);
  for (const std::string& v : order) {
    const auto nbrs = spec.neighbors(v);
    degree_total[index[v]] = static_cast<int>(nbrs.size());
    for (const auto& [w, orbit] : nbrs) {
      auto it = index.find(w);
      if (it == index.end()) continue;
      ++degree_in[index[v]];
      const bool v_first =
          std::make_pair(dist[v], v) < std::make_pair(dist[w], w);
      const std::string& a = v_first ? v : w;
      const std::string& b = v_first ? w : v;
      if (!seen.insert({a, b}).second) continue;
      edges.push_back({std::max(dist[a], dist[b]), a, b, orbit});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) {
    return std::tie(x.app, x.tail, x.head) < std::tie(y.app, y.tail, y.head);
  });

  std::vector<Eigen::Triplet<std::int64_t>> trip;
  for (const E& e : edges) {
    const int col = static_cast<int>(t.cells[1].size());
    t.cells[1].push_back({e.tail + "|" + e.head, e.orbit});
    trip.emplace_back(index[e.tail], col, -1);
    trip.emplace_back(index[e.head], col, 1);
  }
  t.boundary[1] = SparseInt(static_cast<int>(order.size()), static_cast<int>(edges.size()));
  t.boundary[1].setFromTriplets(trip.begin(), trip.end());

  t.interior[0].resize(order.size());
  for (std::size_t v = 0; v < order.size(); ++v)
    t.interior[0][v] = (degree_in[v] == degree_total[v]);
  t.interior[1].assign(edges.size(), 1);

  t.orbit_weight[0] = spec.vertex_orbit_weights;
  t.orbit_weight[1] = spec.edge_orbit_weights;
  t.orbit_rep[0].assign(t.orbit_weight[0].size(), -1);
  t.orbit_rep[1].assign(t.orbit_weight[1].size(), -1);
  for (std::size_t i = 0; i < t.cells[0].size(); ++i)
    if (t.orbit_rep[0][t.cells[0][i].orbit] < 0) t.orbit_rep[0][t.cells[0][i].orbit] = static_cast<int>(i);
  for (std::size_t i = 0; i < t.cells[1].size(); ++i)
    if (t.orbit_rep[1][t.cells[1][i].orbit] < 0) t.orbit_rep[1][t.cells[1][i].orbit] = static_cast<int>(i);
  return t;
}

// --- free groups ------------------------------------------------------------

char positive_letter(int g) { return static_cast<char>('a' + g); }
char inverse_letter(int g) { return static_cast<char>('A' + g); }
bool cancels(char x, char y) { return x != y && std::tolower(x) == std::tolower(y); }

std::vector<std::pair<std::string, int>> free_group_neighbors(const std::string& w, int rank) {
  std::vector<std::pair<std::string, int>> out;
  for (int g = 0; g < rank; ++g) {
    for (char x : {positive_letter(g), inverse_letter(g)}) {
      if (!w.empty() && cancels(w.back(), x))
        out.push_back({w.substr(0, w.size() - 1), g});
      else
        out.push_back({w + x, g});
    }
  }
  return out;
}

// --- free abelian grids -----------------------------------------------------

std::vector<int> parse_coords(const std::string& key, int dim) {
  std::vector<int> x(dim, 0);
  std::stringstream ss(key);
  std::string item;
  for (int i = 0; i < dim && std::getline(ss, item, ','); ++i) x[i] = std::stoi(item);
  return x;
}

std::string coord_key(const std::vector<int>& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(x[i]);
  }
  return s;
}

std::vector<std::pair<std::string, int>> grid_neighbors(const std::string& key, int dim) {
  std::vector<int> x = parse_coords(key, dim);
  std::vector<std::pair<std::string, int>> out;
  for (int i = 0; i < dim; ++i) {
    for (int s : {+1, -1}) {
      x[i] += s;
      out.push_back({coord_key(x), i});
      x[i] -= s;
    }
  }
  return out;
}

// --- free products of finite cyclic groups ----------------------------------

struct Syllable {
  int factor;
  int exp;
};

std::vector<Syllable> parse_word(const std::string& key) {
  std::vector<Syllable> w;
  if (key.empty()) return w;
  std::stringstream ss(key);
  std::string item;
  while (std::getline(ss, item, '.')) {
    const auto caret = item.find('^');
    w.push_back({std::stoi(item.substr(1, caret - 1)), std::stoi(item.substr(caret + 1))});
  }
  return w;
}

std::string word_key(const std::vector<Syllable>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += 'f' + std::to_string(w[i].factor) + '^' + std::to_string(w[i].exp);
  }
  return s;
}

std::vector<std::pair<std::string, int>> free_product_neighbors(const std::string& key,
                                                                const std::vector<int>& orders) {
  const std::vector<Syllable> w = parse_word(key);
  std::vector<std::pair<std::string, int>> out;
  for (int f = 0; f < static_cast<int>(orders.size()); ++f) {
    const int m = orders[f];
    std::vector<int> steps = (m == 2) ? std::vector<int>{1} : std::vector<int>{1, m - 1};
    for (int s : steps) {
      std::vector<Syllable> v = w;
      if (!v.empty() && v.back().factor == f) {
        v.back().exp = (v.back().exp + s) % m;
        if (v.back().exp == 0) v.pop_back();
      } else {
        v.push_back({f, s});
      }
      out.push_back({word_key(v), f});
    }
  }
  return out;
}

// --- regular trees with declared weights --------------------------------------

std::vector<std::pair<std::string, int>> regular_tree_neighbors(const std::string& key, int q) {
  std::vector<std::pair<std::string, int>> out;
  if (key.empty()) {
    for (int c = 0; c <= q; ++c) out.push_back({std::to_string(c), 0});
    return out;
  }
  const auto dot = key.rfind('.');
  out.push_back({dot == std::string::npos ? std::string() : key.substr(0, dot), 0});
  for (int c = 0; c < q; ++c) out.push_back({key + "." + std::to_string(c), 0});
  return out;
}

} // namespace

// ---------------------------------------------------------------------------
// OrbitGraph
// ---------------------------------------------------------------------------

Rational OrbitGraph::unordered_orbit_mass(int orbit) const {
  const EdgeOrbit& o = edge_orbits[orbit];
  return o.stab * (o.flipped ? 2 : 1) * haar_scale;
}

int OrbitGraph::root_degree() const {
  int d = 0;
  for (const EdgeOrbit& o : edge_orbits) d += o.arity * (o.flipped ? 1 : 2);
  return d;
}

bool OrbitGraph::is_tree() const {
  if (std::holds_alternative<FreeGroupFamily>(family)) return true;
  if (std::holds_alternative<RegularTreeFamily>(family)) return true;
  if (const auto* g = std::get_if<GridGraphFamily>(&family)) return g->dim == 1;
  if (const auto* p = std::get_if<FreeProductFamily>(&family)) {
    // A factor of order >= 3 contributes its cycle; involutions only give a tree.
    for (int m : p->orders)
      if (m != 2) return false;
    return true;
  }
  if (std::holds_alternative<ExplicitGraphFamily>(family)) {
    Truncation t = ball(kRadiusCap);
    return t.cell_count(1) == t.cell_count(0) - component_count(t);
  }
  return false;
}

bool OrbitGraph::is_finite() const { return std::holds_alternative<ExplicitGraphFamily>(family); }

void OrbitGraph::validate() const {
  for (std::size_t i = 0; i < edge_orbits.size(); ++i) {
    const EdgeOrbit& o = edge_orbits[i];
    if (o.arity <= 0 || o.stab <= 0)
      throw ValidationError("orbit " + std::to_string(i) + ": arity and stab must be positive");
    if (Rational(o.arity) * o.stab != 1)
      throw ValidationError("orbit " + std::to_string(i) +
                            ": arity * stab != root mass (mass consistency)");
  }
  if (const auto* e = std::get_if<ExplicitGraphFamily>(&family)) {
    for (const auto& [u, v] : e->edges) {
      if (u < 0 || v < 0 || u >= e->vertex_count || v >= e->vertex_count)
        throw ValidationError("edge endpoint out of range");
      if (u == v) throw ValidationError("loops are not allowed in graph descriptions");
    }
  }
}

Truncation OrbitGraph::ball(int radius) const {
  GraphSpec spec;
  spec.edge_orbit_weights.reserve(edge_orbits.size());
  for (std::size_t o = 0; o < edge_orbits.size(); ++o)
    spec.edge_orbit_weights.push_back(unordered_orbit_mass(static_cast<int>(o)));
  spec.vertex_orbit_weights = {haar_scale};

  if (const auto* f = std::get_if<FreeGroupFamily>(&family)) {
    const int rank = f->rank;
    spec.radius_cap = 14;
    spec.neighbors = [rank](const std::string& w) { return free_group_neighbors(w, rank); };
  } else if (const auto* g = std::get_if<GridGraphFamily>(&family)) {
    const int dim = g->dim;
    spec.root = coord_key(std::vector<int>(dim, 0));
    spec.neighbors = [dim](const std::string& k) { return grid_neighbors(k, dim); };
  } else if (const auto* p = std::get_if<FreeProductFamily>(&family)) {
    const std::vector<int> orders = p->orders;
    spec.radius_cap = 20;
    spec.neighbors = [orders](const std::string& k) { return free_product_neighbors(k, orders); };
  } else if (const auto* r = std::get_if<RegularTreeFamily>(&family)) {
    const int q = r->q;
    spec.radius_cap = 14;
    spec.neighbors = [q](const std::string& k) { return regular_tree_neighbors(k, q); };
  } else {
    const auto& e = std::get<ExplicitGraphFamily>(family);
    if (e.vertex_count == 0) {
      Truncation empty;
      empty.dims = 1;
      empty.cells.resize(2);
      empty.boundary.assign(2, SparseInt());
      empty.interior.resize(2);
      empty.orbit_weight.resize(2);
      empty.orbit_rep.resize(2);
      empty.finite_total = true;
      return empty;
    }
    std::vector<std::vector<std::pair<int, int>>> adj(e.vertex_count);  // (other, edge orbit)
    for (std::size_t i = 0; i < e.edges.size(); ++i) {
      adj[e.edges[i].first].push_back({e.edges[i].second, static_cast<int>(i)});
      adj[e.edges[i].second].push_back({e.edges[i].first, static_cast<int>(i)});
    }
    spec.root = "0";
    spec.neighbors = [adj](const std::string& k) {
      std::vector<std::pair<std::string, int>> out;
      for (auto [w, orbit] : adj[std::stoul(k)]) out.push_back({std::to_string(w), orbit});
      std::sort(out.begin(), out.end());
      return out;
    };
    spec.vertex_orbit = [](const std::string& k) { return static_cast<int>(std::stoul(k)); };
    spec.vertex_orbit_weights.assign(e.vertex_count, haar_scale);
    spec.edge_orbit_weights.assign(e.edges.size(), haar_scale);
  }
  return build_graph_ball(spec, radius);
}

OrbitGraph make_free_group_graph(int rank) {
  if (rank < 1) throw ValidationError("free group rank must be >= 1");
  OrbitGraph g;
  g.family = FreeGroupFamily{rank};
  g.edge_orbits.assign(rank, EdgeOrbit{1, 1, false});
  return g;
}

OrbitGraph make_grid_graph(int dim) {
  if (dim < 1 || dim > 4) throw ValidationError("grid dimension must be in [1,4]");
  OrbitGraph g;
  g.family = GridGraphFamily{dim};
  g.edge_orbits.assign(dim, EdgeOrbit{1, 1, false});
  return g;
}

OrbitGraph make_free_product_graph(std::vector<int> orders) {
  if (orders.size() < 2) throw ValidationError("free product needs at least two factors");
  for (int m : orders)
    if (m < 2) throw ValidationError("cyclic factor order must be >= 2");
  OrbitGraph g;
  g.edge_orbits.reserve(orders.size());
  for (int m : orders) g.edge_orbits.push_back(EdgeOrbit{1, 1, m == 2});
  g.family = FreeProductFamily{std::move(orders)};
  return g;
}

OrbitGraph make_regular_tree_graph(int q) {
  if (q < 2) throw ValidationError("invalid-q");
  OrbitGraph g;
  g.family = RegularTreeFamily{q};
  g.edge_orbits = {EdgeOrbit{q + 1, Rational(1, q + 1), true}};
  return g;
}

OrbitGraph make_explicit_graph(int vertex_count, std::vector<std::pair<int, int>> edges) {
  if (vertex_count < 0) throw ValidationError("negative vertex count");
  if (vertex_count == 0 && !edges.empty()) throw ValidationError("edges without vertices");
  for (auto& e : edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  OrbitGraph g;
  g.family = ExplicitGraphFamily{vertex_count, std::move(edges)};
  g.edge_orbits.clear();  // trivial symmetry: per-cell orbits, unit weights
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// CofiniteComplex
// ---------------------------------------------------------------------------

Rational FolnerRule::mass(int k) const {
  Rational m = 1;
  for (int i = 0; i < dim; ++i) m *= k;
  return m;
}

namespace {

int subset_index(int bits, int size, int dim) {
  // Index of the size-`size` subset among same-size subsets in increasing
  // bit-pattern order.
  int idx = 0;
  for (int b = 0; b < (1 << dim); ++b) {
    if (b == bits) return idx;
    if (__builtin_popcount(b) == size) ++idx;
  }
  return -1;
}

int subsets_of_size(int dim, int size) {
  int c = 1;
  for (int i = 0; i < size; ++i) c = c * (dim - i) / (i + 1);
  return c;
}

struct CubicalCell {
  std::vector<int> base;
  int bits;  // spanned axes
};

std::string cubical_key(const CubicalCell& c) {
  return coord_key(c.base) + "|" + std::to_string(c.bits);
}

/// Full cubical complex on the box: base coordinates within [lo, hi-1] on
/// spanned axes and [lo, hi] on the others, for per-axis bounds.
Truncation build_box_complex(int dim, int top_dim, const std::vector<std::pair<int, int>>& range,
                             const std::vector<std::vector<Rational>>& orbit_weight,
                             const std::vector<std::pair<int, int>>& interior_range) {
  Truncation t;
  t.dims = top_dim;
  t.cells.resize(top_dim + 1);
  t.boundary.resize(top_dim + 1);
  t.interior.resize(top_dim + 1);
  t.orbit_weight = orbit_weight;
  t.orbit_rep.resize(top_dim + 1);

  std::vector<std::map<std::string, int>> index(top_dim + 1);
  std::vector<std::vector<CubicalCell>> raw(top_dim + 1);

  std::function<void(std::vector<int>&, int)> enumerate = [&](std::vector<int>& x, int axis) {
    if (axis == dim) {
      for (int bits = 0; bits < (1 << dim); ++bits) {
        const int n = __builtin_popcount(bits);
        if (n > top_dim) continue;
        bool ok = true;
        for (int a = 0; a < dim && ok; ++a) {
          const auto [lo, hi] = range[a];
          if (bits & (1 << a))
            ok = x[a] >= lo && x[a] + 1 <= hi;
          else
            ok = x[a] >= lo && x[a] <= hi;
        }
        if (ok) raw[n].push_back({x, bits});
      }
      return;
    }
    for (int v = range[axis].first; v <= range[axis].second; ++v) {
      x[axis] = v;
      enumerate(x, axis + 1);
    }
  };
  std::vector<int> x(dim, 0);
  enumerate(x, 0);

  for (int n = 0; n <= top_dim; ++n) {
    std::sort(raw[n].begin(), raw[n].end(), [&](const CubicalCell& a, const CubicalCell& b) {
      auto level = [&](const CubicalCell& c) {
        int lv = 0;
        for (int a = 0; a < dim; ++a) {
          const int reach = (c.bits & (1 << a)) ? std::max(std::abs(c.base[a]), std::abs(c.base[a] + 1))
                                                : std::abs(c.base[a]);
          lv = std::max(lv, reach);
        }
        return lv;
      };
      const int la = level(a), lb = level(b);
      if (la != lb) return la < lb;
      return cubical_key(a) < cubical_key(b);
    });
    for (const CubicalCell& c : raw[n]) {
      index[n][cubical_key(c)] = static_cast<int>(t.cells[n].size());
      t.cells[n].push_back({cubical_key(c), subset_index(c.bits, n, dim)});
    }
  }

  for (int n = 1; n <= top_dim; ++n) {
    std::vector<Eigen::Triplet<std::int64_t>> trip;
    for (std::size_t col = 0; col < raw[n].size(); ++col) {
      const CubicalCell& c = raw[n][col];
      int before = 0;
      for (int a = 0; a < dim; ++a) {
        if (!(c.bits & (1 << a))) continue;
        const std::int64_t sign = (before % 2 == 0) ? 1 : -1;
        CubicalCell lo{c.base, c.bits & ~(1 << a)};
        CubicalCell hi{c.base, c.bits & ~(1 << a)};
        hi.base[a] += 1;
        trip.emplace_back(index[n - 1].at(cubical_key(hi)), static_cast<int>(col), sign);
        trip.emplace_back(index[n - 1].at(cubical_key(lo)), static_cast<int>(col), -sign);
        ++before;
      }
    }
    t.boundary[n] = SparseInt(t.cell_count(n - 1), t.cell_count(n));
    t.boundary[n].setFromTriplets(trip.begin(), trip.end());
  }

  for (int n = 0; n <= top_dim; ++n) {
    t.interior[n].resize(t.cells[n].size());
    for (std::size_t i = 0; i < raw[n].size(); ++i) {
      const CubicalCell& c = raw[n][i];
      bool inside = (n < top_dim);
      for (int a = 0; a < dim && inside; ++a) {
        if (c.bits & (1 << a)) continue;
        const auto [lo, hi] = interior_range[a];
        inside = c.base[a] - 1 >= lo && c.base[a] + 1 <= hi;
      }
      t.interior[n][i] = (n == top_dim) ? 1 : (inside ? 1 : 0);
    }
    t.orbit_rep[n].assign(t.orbit_weight[n].size(), -1);
    for (std::size_t i = 0; i < t.cells[n].size(); ++i)
      if (t.orbit_rep[n][t.cells[n][i].orbit] < 0) t.orbit_rep[n][t.cells[n][i].orbit] = static_cast<int>(i);
  }
  return t;
}

Truncation wedge_cover_level(int rank, int level, const std::vector<Rational>& edge_weights,
                             const Rational& vertex_weight) {
  // F_i . closure(fundamental domain): edges (w, w a_j) for every reduced w
  // of length <= i; vertices are the endpoints.
  std::set<std::string> vertices;
  struct E {
    int app;
    std::string tail, head;
    int orbit;
  };
  std::vector<E> edges;
  std::set<std::pair<std::string, std::string>> seen;

  std::vector<std::string> words{""};
  std::map<std::string, int> dist{{"", 0}};
  std::vector<std::string> layer{""};
  for (int r = 1; r <= level + 1 && !layer.empty(); ++r) {
    std::set<std::string> next;
    for (const std::string& v : layer) {
      for (const auto& [w, orbit] : free_group_neighbors(v, rank)) {
        (void)orbit;
        if (!dist.count(w)) next.insert(w);
      }
    }
    layer.assign(next.begin(), next.end());
    for (const std::string& w : layer) {
      dist[w] = r;
      words.push_back(w);
    }
  }

  for (const std::string& w : words) {
    if (dist[w] > level) continue;
    for (int g = 0; g < rank; ++g) {
      const char a = positive_letter(g);
      std::string other = (!w.empty() && cancels(w.back(), a)) ? w.substr(0, w.size() - 1) : w + a;
      const bool w_first = std::make_pair(dist[w], w) < std::make_pair(dist[other], other);
      const std::string& t0 = w_first ? w : other;
      const std::string& t1 = w_first ? other : w;
      if (!seen.insert({t0, t1}).second) continue;
      edges.push_back({std::max(dist[w], dist[other]), t0, t1, g});
      vertices.insert(w);
      vertices.insert(other);
    }
  }
  if (edges.empty()) vertices.insert("");

  std::vector<std::string> vorder(vertices.begin(), vertices.end());
  std::sort(vorder.begin(), vorder.end(), [&](const std::string& a, const std::string& b) {
    return std::make_pair(dist[a], a) < std::make_pair(dist[b], b);
  });
  std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) {
    return std::tie(x.app, x.tail, x.head) < std::tie(y.app, y.tail, y.head);
  });

  Truncation t;
  t.dims = 1;
  t.cells.resize(2);
  t.boundary.resize(2);
  t.interior.resize(2);
  t.orbit_weight = {{vertex_weight}, edge_weights};
  t.orbit_rep.resize(2);

  std::map<std::string, int> index;
  for (const std::string& v : vorder) {
    index[v] = static_cast<int>(t.cells[0].size());
    t.cells[0].push_back({v, 0});
  }
  std::vector<Eigen::Triplet<std::int64_t>> trip;
  std::vector<int> degree(vorder.size(), 0);
  for (const E& e : edges) {
    const int col = static_cast<int>(t.cells[1].size());
    t.cells[1].push_back({e.tail + "|" + e.head, e.orbit});
    trip.emplace_back(index[e.tail], col, -1);
    trip.emplace_back(index[e.head], col, 1);
    ++degree[index[e.tail]];
    ++degree[index[e.head]];
  }
  t.boundary[1] = SparseInt(static_cast<int>(vorder.size()), static_cast<int>(edges.size()));
  t.boundary[1].setFromTriplets(trip.begin(), trip.end());

  t.interior[0].resize(vorder.size());
  for (std::size_t i = 0; i < vorder.size(); ++i) t.interior[0][i] = (degree[i] == 2 * rank);
  t.interior[1].assign(edges.size(), 1);
  t.orbit_rep[0] = {0};
  t.orbit_rep[1].assign(rank, -1);
  for (std::size_t i = 0; i < t.cells[1].size(); ++i)
    if (t.orbit_rep[1][t.cells[1][i].orbit] < 0) t.orbit_rep[1][t.cells[1][i].orbit] = static_cast<int>(i);
  return t;
}

Truncation product_truncation(const Truncation& A, const Truncation& B, int dims,
                              const std::vector<std::vector<Rational>>& orbit_weight,
                              const std::vector<std::vector<int>>& orbit_offset,
                              std::size_t cell_cap) {
  Truncation t;
  t.dims = dims;
  t.cells.resize(dims + 1);
  t.boundary.resize(dims + 1);
  t.interior.resize(dims + 1);
  t.orbit_weight = orbit_weight;
  t.orbit_rep.resize(dims + 1);

  // cell (a, b) with dim(a) = da listed by (da, index a, index b)
  std::vector<std::vector<std::array<int, 3>>> raw(dims + 1);  // (da, ia, ib)
  std::size_t total = 0;
  for (int da = 0; da <= A.dims; ++da) {
    for (int db = 0; db <= B.dims; ++db) {
      const int n = da + db;
      if (n > dims) continue;
      total += static_cast<std::size_t>(A.cell_count(da)) * B.cell_count(db);
      if (total > cell_cap) throw ComputationError("product-too-large");
      for (int ia = 0; ia < A.cell_count(da); ++ia)
        for (int ib = 0; ib < B.cell_count(db); ++ib) raw[n].push_back({da, ia, ib});
    }
  }
  std::vector<std::map<std::array<int, 3>, int>> index(dims + 1);
  for (int n = 0; n <= dims; ++n) {
    std::sort(raw[n].begin(), raw[n].end());
    for (const auto& c : raw[n]) {
      const int da = c[0], db = n - da;
      index[n][c] = static_cast<int>(t.cells[n].size());
      const int orbit =
          orbit_offset[n][da] + A.cells[da][c[1]].orbit * static_cast<int>(B.orbit_weight[db].size()) +
          B.cells[db][c[2]].orbit;
      t.cells[n].push_back({A.cells[da][c[1]].key + "*" + B.cells[db][c[2]].key, orbit});
    }
  }

  for (int n = 1; n <= dims; ++n) {
    std::vector<Eigen::Triplet<std::int64_t>> trip;
    for (const auto& c : raw[n]) {
      const int col = index[n].at(c);
      const int da = c[0], db = n - da;
      if (da >= 1) {
        const SparseInt& ba = A.boundary[da];
        for (SparseInt::InnerIterator it(ba, c[1]); it; ++it)
          trip.emplace_back(index[n - 1].at({da - 1, static_cast<int>(it.row()), c[2]}), col, it.value());
      }
      if (db >= 1) {
        const std::int64_t sign = (da % 2 == 0) ? 1 : -1;
        const SparseInt& bb = B.boundary[db];
        for (SparseInt::InnerIterator it(bb, c[2]); it; ++it)
          trip.emplace_back(index[n - 1].at({da, c[1], static_cast<int>(it.row())}), col,
                            sign * it.value());
      }
    }
    t.boundary[n] = SparseInt(t.cell_count(n - 1), t.cell_count(n));
    t.boundary[n].setFromTriplets(trip.begin(), trip.end());
  }

  for (int n = 0; n <= dims; ++n) {
    t.interior[n].resize(t.cells[n].size());
    for (const auto& c : raw[n]) {
      const int da = c[0], db = n - da;
      t.interior[n][index[n].at(c)] = A.interior[da][c[1]] && B.interior[db][c[2]];
    }
    t.orbit_rep[n].assign(t.orbit_weight[n].size(), -1);
    for (std::size_t i = 0; i < t.cells[n].size(); ++i)
      if (t.orbit_rep[n][t.cells[n][i].orbit] < 0) t.orbit_rep[n][t.cells[n][i].orbit] = static_cast<int>(i);
  }
  t.finite_total = A.finite_total && B.finite_total;
  return t;
}

} // namespace

bool CofiniteComplex::is_finite() const { return std::holds_alternative<FiniteCWFamily>(family); }

Truncation CofiniteComplex::level(int i) const {
  if (i < 0 || i > kRadiusCap) throw ComputationError("expansion-unavailable");
  if (const auto* w = std::get_if<WedgeCoverFamily>(&family)) {
    std::vector<Rational> ew;
    for (const Rational& s : orbit_stab[1]) ew.push_back(s * haar_scale);
    return wedge_cover_level(w->rank, i, ew, orbit_stab[0][0] * haar_scale);
  }
  if (const auto* g = std::get_if<GridComplexFamily>(&family)) {
    std::vector<std::vector<Rational>> ow(dims + 1);
    for (int n = 0; n <= dims; ++n)
      for (const Rational& s : orbit_stab[n]) ow[n].push_back(s * haar_scale);
    const std::vector<std::pair<int, int>> range(g->dim, {-i, i});
    const std::vector<std::pair<int, int>> irange(g->dim, {-i, i});
    return build_box_complex(g->dim, dims, range, ow, irange);
  }
  if (const auto* f = std::get_if<FiniteCWFamily>(&family)) {
    Truncation t;
    t.dims = dims;
    t.cells = f->cells;
    t.boundary = f->boundary;
    t.orbit_weight.resize(dims + 1);
    for (int n = 0; n <= dims; ++n)
      for (const Rational& s : orbit_stab[n]) t.orbit_weight[n].push_back(s * haar_scale);
    t.interior.resize(dims + 1);
    t.orbit_rep.resize(dims + 1);
    for (int n = 0; n <= dims; ++n) {
      t.interior[n].assign(t.cells[n].size(), 1);
      t.orbit_rep[n].assign(t.orbit_weight[n].size(), -1);
      for (std::size_t c = 0; c < t.cells[n].size(); ++c)
        if (t.orbit_rep[n][t.cells[n][c].orbit] < 0) t.orbit_rep[n][t.cells[n][c].orbit] = static_cast<int>(c);
    }
    t.finite_total = true;
    return t;
  }
  const auto& p = std::get<std::shared_ptr<ProductFamily>>(family);
  const Truncation a = p->left.level(i);
  const Truncation b = p->right.level(i);
  std::vector<std::vector<Rational>> ow(dims + 1);
  std::vector<std::vector<int>> offsets(dims + 1);
  for (int n = 0; n <= dims; ++n) {
    offsets[n].assign(p->left.dims + 1, 0);
    for (int da = 0; da <= std::min(n, p->left.dims); ++da) {
      const int db = n - da;
      if (db > p->right.dims) continue;
      offsets[n][da] = static_cast<int>(ow[n].size());
      for (const Rational& sa : p->left.orbit_stab[da])
        for (const Rational& sb : p->right.orbit_stab[db])
          ow[n].push_back(sa * p->left.haar_scale * sb * p->right.haar_scale * haar_scale);
    }
  }
  return product_truncation(a, b, dims, ow, offsets, product_cell_cap);
}

Truncation CofiniteComplex::folner_truncation(int k) const {
  if (!folner) throw ComputationError("not-amenable-family");
  if (k < 1) throw ComputationError("invalid-schedule");
  const auto* g = std::get_if<GridComplexFamily>(&family);
  if (!g) throw ComputationError("not-amenable-family");
  std::vector<std::vector<Rational>> ow(dims + 1);
  for (int n = 0; n <= dims; ++n)
    for (const Rational& s : orbit_stab[n]) ow[n].push_back(s * haar_scale);
  const std::vector<std::pair<int, int>> range(g->dim, {0, k});
  const std::vector<std::pair<int, int>> irange(g->dim, {0, k});
  Truncation t = build_box_complex(g->dim, dims, range, ow, irange);
  t.finite_total = true;
  return t;
}

std::vector<Rational> CofiniteComplex::folner_boundary_mass(int k) const {
  const auto* g = std::get_if<GridComplexFamily>(&family);
  if (!g || !folner) throw ComputationError("not-amenable-family");
  // Gamma_n minus F_k . L_n: cells whose basepoint has a coordinate equal to k.
  Truncation t = folner_truncation(k);
  std::vector<Rational> mass(dims + 1, 0);
  for (int n = 0; n <= dims; ++n) {
    for (const Cell& c : t.cells[n]) {
      const auto bar = c.key.find('|');
      const std::vector<int> base = parse_coords(c.key.substr(0, bar), g->dim);
      if (std::any_of(base.begin(), base.end(), [&](int v) { return v == k; }))
        mass[n] += t.orbit_weight[n][c.orbit];
    }
  }
  return mass;
}

std::optional<std::vector<Rational>> CofiniteComplex::exact_betti() const {
  if (const auto* w = std::get_if<WedgeCoverFamily>(&family))
    return std::vector<Rational>{0, Rational(w->rank - 1) / haar_scale};
  if (const auto* g = std::get_if<GridComplexFamily>(&family)) {
    if (g->filled || g->dim == 1) return std::vector<Rational>(dims + 1, 0);
    return std::nullopt;  // higher-d skeleta are not contractible
  }
  if (const auto* p = std::get_if<std::shared_ptr<ProductFamily>>(&family)) {
    const auto a = (*p)->left.exact_betti();
    const auto b = (*p)->right.exact_betti();
    if (!a || !b) return std::nullopt;
    std::vector<Rational> out(a->size() + b->size() - 1, 0);
    for (std::size_t i = 0; i < a->size(); ++i)
      for (std::size_t j = 0; j < b->size(); ++j) out[i + j] += (*a)[i] * (*b)[j];
    for (Rational& v : out) v /= haar_scale;  // the product's own Haar rescaling
    return out;
  }
  return std::nullopt;
}

Rational CofiniteComplex::euler_weight_sum() const {
  Rational total = 0;
  if (is_finite()) {
    const auto& f = std::get<FiniteCWFamily>(family);
    for (int n = 0; n <= dims; ++n) {
      Rational level_sum = 0;
      for (const Cell& c : f.cells[n]) level_sum += Rational(1) / (orbit_stab[n][c.orbit] * haar_scale);
      total += (n % 2 == 0) ? level_sum : -level_sum;
    }
    return total;
  }
  for (int n = 0; n <= dims; ++n) {
    Rational level_sum = 0;
    for (const Rational& s : orbit_stab[n]) level_sum += Rational(1) / (s * haar_scale);
    total += (n % 2 == 0) ? level_sum : -level_sum;
  }
  return total;
}

Rational CofiniteComplex::total_vertex_mass() const {
  if (!is_finite()) throw ComputationError("total mass undefined for infinite families");
  const auto& f = std::get<FiniteCWFamily>(family);
  Rational total = 0;
  for (const Cell& c : f.cells[0]) total += orbit_stab[0][c.orbit] * haar_scale;
  return total;
}

CofiniteComplex make_wedge_cover_complex(int rank) {
  if (rank < 1) throw ValidationError("wedge cover rank must be >= 1");
  CofiniteComplex c;
  c.family = WedgeCoverFamily{rank};
  c.dims = 1;
  c.orbit_stab = {{1}, std::vector<Rational>(rank, 1)};
  return c;
}

CofiniteComplex make_grid_complex(int dim, bool filled) {
  if (dim < 1 || dim > 3) throw ValidationError("grid complex dimension must be in [1,3]");
  CofiniteComplex c;
  c.family = GridComplexFamily{dim, filled};
  c.dims = filled ? dim : 1;
  c.orbit_stab.resize(c.dims + 1);
  for (int n = 0; n <= c.dims; ++n) c.orbit_stab[n].assign(subsets_of_size(dim, n), 1);
  c.folner = FolnerRule{"boxes", dim};
  return c;
}

namespace {
CofiniteComplex finite_cw(std::vector<std::vector<Cell>> cells, std::vector<SparseInt> boundary) {
  CofiniteComplex c;
  c.dims = static_cast<int>(cells.size()) - 1;
  c.orbit_stab.resize(c.dims + 1);
  for (int n = 0; n <= c.dims; ++n) c.orbit_stab[n].assign(cells[n].size(), 1);
  FiniteCWFamily f;
  f.cells = std::move(cells);
  f.boundary = std::move(boundary);
  c.family = std::move(f);
  return c;
}
} // namespace

CofiniteComplex make_finite_cycle_complex(int m) {
  if (m < 3) throw ValidationError("cycle length must be >= 3");
  std::vector<std::vector<Cell>> cells(2);
  for (int v = 0; v < m; ++v) cells[0].push_back({"v" + std::to_string(v), v});
  std::vector<Eigen::Triplet<std::int64_t>> trip;
  for (int e = 0; e < m; ++e) {
    cells[1].push_back({"e" + std::to_string(e), e});
    trip.emplace_back(e, e, -1);
    trip.emplace_back((e + 1) % m, e, 1);
  }
  std::vector<SparseInt> boundary(2);
  boundary[1] = SparseInt(m, m);
  boundary[1].setFromTriplets(trip.begin(), trip.end());
  return finite_cw(std::move(cells), std::move(boundary));
}

CofiniteComplex make_finite_wedge_complex(int circles) {
  if (circles < 1) throw ValidationError("wedge needs at least one circle");
  std::vector<std::vector<Cell>> cells(2);
  cells[0].push_back({"v", 0});
  for (int e = 0; e < circles; ++e) cells[1].push_back({"loop" + std::to_string(e), e});
  std::vector<SparseInt> boundary(2);
  boundary[1] = SparseInt(1, circles);  // loops: zero boundary columns
  return finite_cw(std::move(cells), std::move(boundary));
}

CofiniteComplex make_filled_triangle_complex() {
  std::vector<std::vector<Cell>> cells(3);
  for (int v = 0; v < 3; ++v) cells[0].push_back({"v" + std::to_string(v), v});
  const std::array<std::pair<int, int>, 3> edges{{{0, 1}, {0, 2}, {1, 2}}};
  std::vector<Eigen::Triplet<std::int64_t>> t1, t2;
  for (int e = 0; e < 3; ++e) {
    cells[1].push_back({"e" + std::to_string(edges[e].first) + std::to_string(edges[e].second), e});
    t1.emplace_back(edges[e].first, e, -1);
    t1.emplace_back(edges[e].second, e, 1);
  }
  cells[2].push_back({"f012", 0});
  t2.emplace_back(2, 0, 1);   // [12]
  t2.emplace_back(1, 0, -1);  // [02]
  t2.emplace_back(0, 0, 1);   // [01]
  std::vector<SparseInt> boundary(3);
  boundary[1] = SparseInt(3, 3);
  boundary[1].setFromTriplets(t1.begin(), t1.end());
  boundary[2] = SparseInt(3, 1);
  boundary[2].setFromTriplets(t2.begin(), t2.end());
  return finite_cw(std::move(cells), std::move(boundary));
}

CofiniteComplex make_point_complex() {
  std::vector<std::vector<Cell>> cells(1);
  cells[0].push_back({"pt", 0});
  return finite_cw(std::move(cells), {SparseInt()});
}

CofiniteComplex make_explicit_graph_complex(int vertex_count,
                                            std::vector<std::pair<int, int>> edges) {
  OrbitGraph g = make_explicit_graph(vertex_count, std::move(edges));
  const auto& fam = std::get<ExplicitGraphFamily>(g.family);
  std::vector<std::vector<Cell>> cells(2);
  for (int v = 0; v < fam.vertex_count; ++v) cells[0].push_back({std::to_string(v), v});
  std::vector<Eigen::Triplet<std::int64_t>> trip;
  for (std::size_t e = 0; e < fam.edges.size(); ++e) {
    cells[1].push_back(
        {std::to_string(fam.edges[e].first) + "|" + std::to_string(fam.edges[e].second),
         static_cast<int>(e)});
    trip.emplace_back(fam.edges[e].first, static_cast<int>(e), -1);
    trip.emplace_back(fam.edges[e].second, static_cast<int>(e), 1);
  }
  std::vector<SparseInt> boundary(2);
  boundary[1] = SparseInt(fam.vertex_count, static_cast<int>(fam.edges.size()));
  boundary[1].setFromTriplets(trip.begin(), trip.end());
  return finite_cw(std::move(cells), std::move(boundary));
}

CofiniteComplex product_complex(const CofiniteComplex& a, const CofiniteComplex& b) {
  CofiniteComplex c;
  c.dims = a.dims + b.dims;
  c.haar_scale = 1;
  c.orbit_stab.resize(c.dims + 1);
  for (int n = 0; n <= c.dims; ++n) {
    for (int da = 0; da <= std::min(n, a.dims); ++da) {
      const int db = n - da;
      if (db > b.dims) continue;
      for (const Rational& sa : a.orbit_stab[da])
        for (const Rational& sb : b.orbit_stab[db])
          c.orbit_stab[n].push_back(sa * a.haar_scale * sb * b.haar_scale);
    }
  }
  auto pf = std::make_shared<ProductFamily>();
  pf->left = a;
  pf->right = b;
  c.family = pf;
  if (a.is_finite() && b.is_finite()) {
    // Materialize the finite product so downstream code sees a FiniteCWFamily.
    Truncation t = c.level(0);
    FiniteCWFamily f;
    f.cells = t.cells;
    f.boundary = t.boundary;
    CofiniteComplex out;
    out.dims = c.dims;
    out.orbit_stab = c.orbit_stab;
    out.family = std::move(f);
    return out;
  }
  return c;
}

CofiniteComplex complex_of_graph(const OrbitGraph& g) {
  if (g.is_finite()) {
    const auto& fam = std::get<ExplicitGraphFamily>(g.family);
    CofiniteComplex c = make_explicit_graph_complex(fam.vertex_count, fam.edges);
    c.haar_scale = g.haar_scale;
    return c;
  }
  if (const auto* f = std::get_if<FreeGroupFamily>(&g.family)) {
    CofiniteComplex c = make_wedge_cover_complex(f->rank);
    c.haar_scale = g.haar_scale;
    return c;
  }
  if (const auto* gr = std::get_if<GridGraphFamily>(&g.family)) {
    CofiniteComplex c = make_grid_complex(gr->dim, false);
    c.haar_scale = g.haar_scale;
    return c;
  }
  throw ComputationError("no complex form for this graph family");
}

} // namespace l2betti
