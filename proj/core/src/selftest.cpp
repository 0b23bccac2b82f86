#include "l2betti/selftest.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "l2betti/buildings.hpp"
#include "l2betti/complex_invariants.hpp"
#include "l2betti/errors.hpp"
#include "l2betti/ft_algebra.hpp"
#include "l2betti/graph_invariants.hpp"
#include "l2betti/integer_rank.hpp"

namespace l2betti {

bool SelftestReport::all_passed() const {
  for (const auto& e : entries)
    if (!e.passed) return false;
  return true;
}

namespace {

void push(SelftestReport& report, const std::string& name, bool passed,
          const std::string& detail = "") {
  report.entries.push_back({name, passed, detail});
}

std::string trial_detail(int failures, int trials) {
  std::ostringstream out;
  out << failures << " failures in " << trials << " trials";
  return out.str();
}

} // namespace

SelftestReport run_selftest(const SelftestOptions& opts) {
  SelftestReport report;
  FTRandom rnd(opts.seed);

  // Dimension axioms on randomized finite tracial algebras.
  {
    int failures = 0;
    for (int t = 0; t < opts.trials; ++t) {
      const FTAlgebra a = rnd.algebra();
      const FTModule p = rnd.projection(a, 1 + (t % 3));
      const FTModule q = rnd.subprojection(p);
      if (!check_additivity(p, q)) ++failures;
    }
    push(report, "dimension.additivity", failures == 0, trial_detail(failures, opts.trials));
  }
  {
    int failures = 0;
    for (int t = 0; t < opts.trials; ++t) {
      const FTAlgebra a = rnd.algebra();
      const FTModule p = rnd.projection(a, 1 + (t % 3));
      const FTModule q = rnd.subprojection(p);
      if (dim_projective(q) > dim_projective(p) + 1e-9) ++failures;
    }
    push(report, "dimension.monotonicity", failures == 0, trial_detail(failures, opts.trials));
  }
  {
    int failures = 0;
    for (int t = 0; t < opts.trials; ++t) {
      const FTAlgebra a = rnd.algebra();
      const FTModule m = rnd.projection(a, 1 + (t % 2));
      const FTElement p = rnd.central_support_projection(a);
      if (!check_compression(m, p)) ++failures;
    }
    push(report, "dimension.compression", failures == 0, trial_detail(failures, opts.trials));
  }
  {
    int failures = 0;
    for (int t = 0; t < opts.trials; ++t) {
      const FTAlgebra a = rnd.algebra();
      const FTChain chain = rnd.nested_kernel_chain(a, 1 + (t % 2), 2 + (t % 3));
      if (!check_limit_formulas(chain)) ++failures;
    }
    push(report, "dimension.limit-formulas", failures == 0, trial_detail(failures, opts.trials));
  }
  {
    int failures = 0;
    for (int t = 0; t < opts.trials; ++t) {
      const FTAlgebra a = rnd.algebra();
      FTModule m = rnd.projection(a, 1);
      if (t % 4 == 0) m.projection = FTElement::zero(a, 1);
      if (!sauer_zero_dimension(m)) ++failures;
    }
    push(report, "dimension.sauer-local-criterion", failures == 0,
         trial_detail(failures, opts.trials));
  }
  {
    const int trials = std::max(1, opts.trials / 4);
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
      const FTAlgebra a = rnd.algebra(2, 3);
      std::vector<FTVector> gens;
      for (int g = 0; g < 1 + (t % 2); ++g) gens.push_back(rnd.vector(a, 1 + (t % 2)));
      const double fast = dim_closed_submodule(a, gens);
      const double slow = dim_closed_submodule_oracle(a, gens);
      if (std::abs(fast - slow) > 1e-8) ++failures;
    }
    push(report, "dimension.closed-submodule-vs-gram-schmidt", failures == 0,
         trial_detail(failures, trials));
  }

  // Closed forms.
  {
    bool ok = true;
    std::string detail;
    for (int k = 2; k <= 4 && ok; ++k) {
      const Rational v = beta1_tree_closed_form(make_free_group_graph(k));
      if (v != k - 1) {
        ok = false;
        detail = "free rank " + std::to_string(k) + " gave " + fraction_string(v);
      }
    }
    if (ok && beta1_tree_closed_form(make_grid_graph(1)) != 0) {
      ok = false;
      detail = "line gave nonzero";
    }
    for (int q = 2; q <= 5 && ok; ++q) {
      const Rational v = beta1_tree_closed_form(make_regular_tree_graph(q));
      if (v != Rational(q - 1, 2)) {
        ok = false;
        detail = "regular tree q=" + std::to_string(q) + " gave " + fraction_string(v);
      }
    }
    push(report, "closed-form.tree-beta1", ok, detail);
  }
  {
    bool ok = top_degree_lower_bound({2, 9, {}}) == Rational(7, 10) &&
              top_degree_lower_bound({1, 2, {}}) == Rational(1, 3) &&
              top_degree_lower_bound({2, 2, {}}) == 0;
    for (long q = 2; q <= 64 && ok; ++q)
      for (int n = 1; n <= 6 && ok; ++n)
        ok = (top_degree_lower_bound({n, q, {}}) > 0) == (q > n);
    for (long q = 2; q <= 8 && ok; ++q)
      ok = tree_building_beta1(q) == top_degree_lower_bound({1, q, {}});
    push(report, "closed-form.building-bound", ok);
  }
  {
    const std::vector<Rational> one_hot{0, 1, 0};
    const auto conv = kunneth(one_hot, one_hot);
    bool ok = conv == std::vector<Rational>{0, 0, 1, 0, 0};
    const std::vector<Rational> zero3{0, 0, 0};
    for (const Rational& v : kunneth(one_hot, zero3)) ok = ok && v == 0;
    const std::vector<Rational> unit{1};
    ok = ok && kunneth(unit, one_hot) == one_hot;
    ok = ok && lattice_rescale(lattice_rescale(Rational(7, 10), 3), 4) ==
                   lattice_rescale(Rational(7, 10), 12);
    push(report, "closed-form.kunneth-and-rescale", ok);
  }
  {
    // Haar homogeneity of the exact formulas, scale 3.
    OrbitGraph f2 = make_free_group_graph(2);
    OrbitGraph f2s = f2;
    f2s.haar_scale = 3;
    bool ok = beta1_tree_closed_form(f2s) == beta1_tree_closed_form(f2) / 3;
    OrbitGraph tri = make_explicit_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    OrbitGraph tri_s = tri;
    tri_s.haar_scale = 3;
    const auto b0 = beta0_graph(tri, {});
    const auto b0s = beta0_graph(tri_s, {});
    ok = ok && std::abs(b0s.value - b0.value / 3) < 1e-15;
    push(report, "closed-form.haar-homogeneity", ok);
  }
  {
    // Boundary operators compose to zero across the built-in families.
    bool ok = true;
    ok = ok && make_grid_complex(2, true).level(3).dd_is_zero();
    ok = ok && make_grid_complex(3, true).level(2).dd_is_zero();
    ok = ok && make_filled_triangle_complex().level(0).dd_is_zero();
    const auto w2 = make_wedge_cover_complex(2);
    ok = ok && product_complex(w2, w2).level(1).dd_is_zero();
    push(report, "structure.boundary-squares-to-zero", ok);
  }
  {
    // Euler consistency on finite complexes, exact rationals.
    bool ok = true;
    for (const CofiniteComplex& c :
         {make_filled_triangle_complex(), make_finite_cycle_complex(5), make_finite_wedge_complex(2)})
      ok = ok && euler_check(c, finite_betti_numbers(c));
    push(report, "structure.euler-finite", ok);
  }

  if (opts.inject_failure)
    push(report, "harness.injected-failure", false, "forced by --inject-failure");
  return report;
}

void write_selftest_report(std::ostream& out, const SelftestReport& report) {
  for (const auto& e : report.entries) {
    out << (e.passed ? "PASS" : "FAIL") << ' ' << e.name;
    if (!e.detail.empty()) out << " (" << e.detail << ")";
    out << '\n';
  }
  out << (report.all_passed() ? "selftest: all checks passed" : "selftest: FAILURES PRESENT")
      << '\n';
}

} // namespace l2betti
