#include "l2betti/graph_invariants.hpp"

#include "l2betti/errors.hpp"

namespace l2betti {

BettiEstimate beta1_graph(const OrbitGraph& g, const std::vector<int>& radii,
                          const std::vector<double>& epsilons, const SpectralOptions& opts) {
  g.validate();

  // Compact cases: finite graphs, including the empty and one-vertex ones.
  if (g.is_finite() || g.root_degree() == 0) return BettiEstimate::point(0.0, 0.0, 0);

  for (int r : radii)
    if (r < 1) throw ComputationError("invalid-schedule");

  DoubleLimitInputs in;
  in.build = [&g](int level) {
    Truncation t = g.ball(level);
    if (component_count(t) != 1) throw ComputationError("internal-inconsistency");
    return t;
  };
  in.degree = 1;
  in.levels = radii;
  in.epsilons = epsilons;
  in.graph_mode = true;
  in.finite = false;
  return double_limit_estimate(in, opts);
}

Rational beta1_tree_closed_form(const OrbitGraph& g) {
  g.validate();
  if (!g.is_tree() || g.is_finite()) throw ComputationError("not-a-tree");
  Rational total = 0;
  for (std::size_t o = 0; o < g.edge_orbits.size(); ++o)
    total += Rational(1) / g.unordered_orbit_mass(static_cast<int>(o));
  return total - Rational(1) / g.haar_scale;
}

std::vector<Rational> beta0_upper_sequence(const OrbitGraph& g, const std::vector<int>& radii) {
  validate_schedule(radii);
  std::vector<Rational> out;
  for (int r : radii) {
    const Rational mass = g.ball(r).skeleton_mass(0);
    if (mass <= 0) throw ComputationError("internal-inconsistency");
    out.push_back(Rational(1) / mass);
  }
  return out;
}

namespace {

BettiEstimate beta0_from_masses(const std::vector<int>& levels, const std::vector<Rational>& inv,
                                bool finite) {
  BettiEstimate est;
  for (std::size_t i = 0; i < levels.size(); ++i)
    est.table.push_back({0, levels[i], levels[i], 0.0, to_double(inv[i]), "upper"});
  if (finite) {
    est = BettiEstimate::point(to_double(inv.back()), 0.0, levels.back());
    for (std::size_t i = 0; i < levels.size(); ++i)
      est.table.push_back({0, levels[i], levels[i], 0.0, to_double(inv[i]), "point"});
    return est;
  }
  est.value = to_double(inv.back());
  est.kind = BettiEstimate::Kind::Bracket;
  est.lo = 0.0;
  est.hi = to_double(inv.back());
  est.level = levels.back();
  est.check_invariants();
  return est;
}

} // namespace

BettiEstimate beta0_graph(const OrbitGraph& g, const std::vector<int>& radii) {
  g.validate();
  if (g.is_finite()) {
    const Truncation whole = g.ball(64);
    const Rational mass = whole.skeleton_mass(0);
    if (mass <= 0) throw ValidationError("graph has no vertices");
    return beta0_from_masses({0}, {Rational(1) / mass}, true);
  }
  validate_schedule(radii);
  return beta0_from_masses(radii, beta0_upper_sequence(g, radii), false);
}

BettiEstimate beta0_complex(const CofiniteComplex& c, const std::vector<int>& levels) {
  if (c.is_finite()) {
    const Rational mass = c.total_vertex_mass();
    if (mass <= 0) throw ValidationError("complex has no vertices");
    return beta0_from_masses({0}, {Rational(1) / mass}, true);
  }
  validate_schedule(levels);
  std::vector<Rational> inv;
  for (int lv : levels) {
    const Rational mass = c.level(lv).skeleton_mass(0);
    if (mass <= 0) throw ComputationError("internal-inconsistency");
    inv.push_back(Rational(1) / mass);
  }
  return beta0_from_masses(levels, inv, false);
}

} // namespace l2betti
