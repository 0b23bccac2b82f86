#include "l2betti/description_io.hpp"

#include <fstream>
#include <sstream>

#include "l2betti/errors.hpp"

namespace l2betti {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::stringstream ss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) {
    if (tok[0] == '#') break;
    tokens.push_back(tok);
  }
  return tokens;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& message) {
  throw ValidationError(source + ":" + std::to_string(line) + ": " + message);
}

struct OrbitOverride {
  int id;
  int arity;
  Rational stab;
  bool flipped;
};

} // namespace

Description parse_description(std::istream& in, const std::string& source_name) {
  std::optional<Description> desc;
  bool adjacency_mode = false;
  int max_vertex = -1;
  std::vector<std::pair<int, int>> edges;
  std::vector<OrbitOverride> overrides;
  std::optional<std::pair<std::string, int>> folner_line;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const std::string& key = tokens[0];

    if (key == "family") {
      if (desc || adjacency_mode) fail(source_name, lineno, "duplicate family/adjacency");
      if (tokens.size() < 2) fail(source_name, lineno, "family needs a name");
      const std::string& name = tokens[1];
      try {
        if (name == "free") {
          desc = make_free_group_graph(std::stoi(tokens.at(2)));
        } else if (name == "grid") {
          const int dim = std::stoi(tokens.at(2));
          const bool filled = tokens.size() > 3 && tokens[3] == "filled";
          if (filled)
            desc = make_grid_complex(dim, true);
          else
            desc = make_grid_graph(dim);
        } else if (name == "freeprod") {
          std::vector<int> orders;
          for (std::size_t i = 2; i < tokens.size(); ++i) orders.push_back(std::stoi(tokens[i]));
          desc = make_free_product_graph(std::move(orders));
        } else if (name == "tree") {
          desc = make_regular_tree_graph(std::stoi(tokens.at(2)));
        } else if (name == "wedge-cover") {
          desc = make_wedge_cover_complex(std::stoi(tokens.at(2)));
        } else if (name == "cycle") {
          desc = make_finite_cycle_complex(std::stoi(tokens.at(2)));
        } else if (name == "wedge") {
          desc = make_finite_wedge_complex(std::stoi(tokens.at(2)));
        } else if (name == "triangle") {
          desc = make_filled_triangle_complex();
        } else if (name == "point") {
          desc = make_point_complex();
        } else {
          fail(source_name, lineno, "unknown family: " + name);
        }
      } catch (const ValidationError&) {
        throw;
      } catch (const std::exception& e) {
        fail(source_name, lineno, std::string("bad family parameters: ") + e.what());
      }
    } else if (key == "adjacency") {
      if (desc || adjacency_mode) fail(source_name, lineno, "duplicate family/adjacency");
      adjacency_mode = true;
    } else if (key == "edge") {
      if (!adjacency_mode) fail(source_name, lineno, "edge outside adjacency block");
      if (tokens.size() != 3) fail(source_name, lineno, "edge needs two endpoints");
      try {
        const int u = std::stoi(tokens[1]);
        const int v = std::stoi(tokens[2]);
        if (u < 0 || v < 0) fail(source_name, lineno, "negative vertex id");
        edges.push_back({u, v});
        max_vertex = std::max({max_vertex, u, v});
      } catch (const ValidationError&) {
        throw;
      } catch (const std::exception&) {
        fail(source_name, lineno, "malformed edge endpoints");
      }
    } else if (key == "orbit") {
      // orbit <id> arity <n> stab <p>/<q> flipped <0|1>
      if (tokens.size() != 8 || tokens[2] != "arity" || tokens[4] != "stab" ||
          tokens[6] != "flipped")
        fail(source_name, lineno, "orbit line must be: orbit <id> arity <n> stab <p>/<q> flipped <0|1>");
      try {
        overrides.push_back({std::stoi(tokens[1]), std::stoi(tokens[3]), parse_fraction(tokens[5]),
                             tokens[7] == "1"});
      } catch (const std::exception& e) {
        fail(source_name, lineno, std::string("malformed orbit line: ") + e.what());
      }
    } else if (key == "folner") {
      if (tokens.size() < 2) fail(source_name, lineno, "folner needs a rule name");
      folner_line = {tokens[1], tokens.size() > 2 ? std::stoi(tokens[2]) : 1};
    } else {
      fail(source_name, lineno, "unknown key: " + key);
    }
  }

  if (adjacency_mode) {
    if (max_vertex < 0) fail(source_name, lineno, "adjacency block has no edges");
    desc = make_explicit_graph(max_vertex + 1, std::move(edges));
  }
  if (!desc) fail(source_name, lineno, "no family or adjacency block");

  if (!overrides.empty()) {
    OrbitGraph* g = std::get_if<OrbitGraph>(&*desc);
    if (!g) fail(source_name, lineno, "orbit lines apply to graph families only");
    for (const OrbitOverride& o : overrides) {
      if (o.id < 0 || o.id >= static_cast<int>(g->edge_orbits.size()))
        fail(source_name, lineno, "orbit " + std::to_string(o.id) + " is out of range");
      g->edge_orbits[o.id] = EdgeOrbit{o.arity, o.stab, o.flipped};
    }
    g->validate();
  }
  if (folner_line) {
    CofiniteComplex* c = std::get_if<CofiniteComplex>(&*desc);
    if (!c || !c->folner)
      fail(source_name, lineno, "folner rule applies to amenable complex families only");
    if (folner_line->first != c->folner->name)
      fail(source_name, lineno, "unknown folner rule: " + folner_line->first);
  }
  if (OrbitGraph* g = std::get_if<OrbitGraph>(&*desc)) g->validate();
  return *desc;
}

Description parse_description_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return parse_description(in, path);
}

namespace {

std::string serialize_graph(const OrbitGraph& g) {
  std::ostringstream out;
  if (const auto* f = std::get_if<FreeGroupFamily>(&g.family)) {
    out << "family free " << f->rank << "\n";
  } else if (const auto* gr = std::get_if<GridGraphFamily>(&g.family)) {
    out << "family grid " << gr->dim << "\n";
  } else if (const auto* p = std::get_if<FreeProductFamily>(&g.family)) {
    out << "family freeprod";
    for (int m : p->orders) out << " " << m;
    out << "\n";
  } else if (const auto* t = std::get_if<RegularTreeFamily>(&g.family)) {
    out << "family tree " << t->q << "\n";
  } else {
    const auto& e = std::get<ExplicitGraphFamily>(g.family);
    out << "adjacency\n";
    for (const auto& [u, v] : e.edges) out << "edge " << u << " " << v << "\n";
    return out.str();
  }
  for (std::size_t i = 0; i < g.edge_orbits.size(); ++i) {
    const EdgeOrbit& o = g.edge_orbits[i];
    out << "orbit " << i << " arity " << o.arity << " stab " << fraction_string(o.stab)
        << " flipped " << (o.flipped ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string serialize_complex(const CofiniteComplex& c) {
  std::ostringstream out;
  if (const auto* w = std::get_if<WedgeCoverFamily>(&c.family)) {
    out << "family wedge-cover " << w->rank << "\n";
  } else if (const auto* g = std::get_if<GridComplexFamily>(&c.family)) {
    out << "family grid " << g->dim << (g->filled ? " filled" : "") << "\n";
    if (c.folner) out << "folner " << c.folner->name << " " << c.folner->dim << "\n";
  } else {
    throw ValidationError("only named complex families serialize");
  }
  return out.str();
}

} // namespace

std::string serialize_description(const Description& d) {
  if (const auto* g = std::get_if<OrbitGraph>(&d)) return serialize_graph(*g);
  return serialize_complex(std::get<CofiniteComplex>(d));
}

bool descriptions_equal(const Description& a, const Description& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ga = std::get_if<OrbitGraph>(&a)) {
    const auto& gb = std::get<OrbitGraph>(b);
    if (ga->edge_orbits.size() != gb.edge_orbits.size()) return false;
    for (std::size_t i = 0; i < ga->edge_orbits.size(); ++i) {
      if (ga->edge_orbits[i].arity != gb.edge_orbits[i].arity) return false;
      if (ga->edge_orbits[i].stab != gb.edge_orbits[i].stab) return false;
      if (ga->edge_orbits[i].flipped != gb.edge_orbits[i].flipped) return false;
    }
    if (ga->family.index() != gb.family.index()) return false;
    if (const auto* f = std::get_if<FreeGroupFamily>(&ga->family))
      return f->rank == std::get<FreeGroupFamily>(gb.family).rank;
    if (const auto* gr = std::get_if<GridGraphFamily>(&ga->family))
      return gr->dim == std::get<GridGraphFamily>(gb.family).dim;
    if (const auto* p = std::get_if<FreeProductFamily>(&ga->family))
      return p->orders == std::get<FreeProductFamily>(gb.family).orders;
    if (const auto* t = std::get_if<RegularTreeFamily>(&ga->family))
      return t->q == std::get<RegularTreeFamily>(gb.family).q;
    const auto& ea = std::get<ExplicitGraphFamily>(ga->family);
    const auto& eb = std::get<ExplicitGraphFamily>(gb.family);
    return ea.vertex_count == eb.vertex_count && ea.edges == eb.edges;
  }
  const auto& ca = std::get<CofiniteComplex>(a);
  const auto& cb = std::get<CofiniteComplex>(b);
  if (ca.family.index() != cb.family.index() || ca.dims != cb.dims) return false;
  if (const auto* w = std::get_if<WedgeCoverFamily>(&ca.family))
    return w->rank == std::get<WedgeCoverFamily>(cb.family).rank;
  if (const auto* g = std::get_if<GridComplexFamily>(&ca.family)) {
    const auto& gb = std::get<GridComplexFamily>(cb.family);
    return g->dim == gb.dim && g->filled == gb.filled;
  }
  return false;
}

} // namespace l2betti
