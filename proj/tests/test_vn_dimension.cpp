#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "l2betti/errors.hpp"
#include "l2betti/families.hpp"
#include "l2betti/ft_algebra.hpp"
#include "l2betti/spectral.hpp"

using namespace l2betti;

namespace {

FTAlgebra m2_half() {
  FTAlgebra a;
  a.blocks = {{2, Rational(1, 2)}};
  return a;
}

} // namespace

TEST_CASE("dim_projective") {
  const FTAlgebra a = m2_half();
  SUBCASE("identity projection over one block (size 2, weight 1/2) is 1.0") {
    CHECK(dim_projective(FTModule{FTElement::identity(a, 1)}) == doctest::Approx(1.0));
  }
  SUBCASE("rank-1 projection in M_2 with weight 1/2 is 0.5") {
    FTElement e = FTElement::zero(a, 1);
    e.block[0](0, 0) = 1.0;
    CHECK(dim_projective(FTModule{e}) == doctest::Approx(0.5));
  }
  SUBCASE("zero projection is 0") {
    CHECK(dim_projective(FTModule{FTElement::zero(a, 1)}) == doctest::Approx(0.0));
  }
  SUBCASE("non-idempotent input is rejected") {
    FTElement e = FTElement::identity(a, 1);
    e.block[0](0, 1) = 0.25;
    CHECK_THROWS_AS(dim_projective(FTModule{e}), ComputationError);
  }
  SUBCASE("independence of the representing projection") {
    // A rank-1 projection onto a rotated line has the same trace.
    FTElement e = FTElement::zero(a, 1);
    const double c = std::cos(0.7), s = std::sin(0.7);
    e.block[0] << c * c, c * s, c * s, s * s;
    CHECK(dim_projective(FTModule{e}) == doctest::Approx(0.5));
  }
}

TEST_CASE("dim_closed_submodule") {
  const FTAlgebra a = m2_half();
  SUBCASE("empty generator set spans nothing") {
    CHECK(dim_closed_submodule(a, {}) == doctest::Approx(0.0));
  }
  SUBCASE("generators spanning everything give the full module dimension") {
    // All matrix-unit vectors of A^1 generate L2(psi).
    std::vector<FTVector> gens;
    for (int c = 0; c < 2; ++c)
      for (int r = 0; r < 2; ++r) {
        FTVector v;
        v.algebra = &a;
        v.rank = 1;
        Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(2, 2);
        blk(c, r) = 1.0;
        v.block = {blk};
        gens.push_back(v);
      }
    CHECK(dim_closed_submodule(a, gens) == doctest::Approx(to_double(a.trace_of_identity())));
  }
  SUBCASE("single generator (1, 0) in the doubled trace representation") {
    FTVector v;
    v.algebra = &a;
    v.rank = 2;
    Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(4, 2);
    blk.topRows(2).setIdentity();
    v.block = {blk};
    const double fast = dim_closed_submodule(a, {v});
    const double slow = dim_closed_submodule_oracle(a, {v});
    CHECK(fast == doctest::Approx(1.0));
    CHECK(fast == doctest::Approx(slow));
  }
  SUBCASE("random generators agree with the Gram-Schmidt oracle") {
    FTRandom rnd(7);
    for (int t = 0; t < 25; ++t) {
      const FTAlgebra alg = rnd.algebra(3, 4);
      std::vector<FTVector> gens;
      for (int g = 0; g <= t % 3; ++g) gens.push_back(rnd.vector(alg, 1 + t % 2));
      CHECK(dim_closed_submodule(alg, gens) ==
            doctest::Approx(dim_closed_submodule_oracle(alg, gens)).epsilon(1e-8));
    }
  }
  SUBCASE("inconsistent vector shapes are rejected") {
    FTVector v;
    v.algebra = &a;
    v.rank = 1;
    v.block = {Eigen::MatrixXd::Zero(3, 2)};
    CHECK_THROWS_AS(dim_closed_submodule(a, {v}), ComputationError);
  }
}

TEST_CASE("additivity") {
  FTRandom rnd(11);
  SUBCASE("q = 0 and q = p") {
    const FTAlgebra a = m2_half();
    const FTModule p{FTElement::identity(a, 2)};
    CHECK(check_additivity(p, FTModule{FTElement::zero(a, 2)}));
    CHECK(check_additivity(p, p));
  }
  SUBCASE("random commuting pairs in M_4 + M_3") {
    FTAlgebra a;
    a.blocks = {{4, Rational(2, 3)}, {3, Rational(1, 5)}};
    for (int t = 0; t < 50; ++t) {
      const FTModule p = rnd.projection(a, 1);
      const FTModule q = rnd.subprojection(p);
      CHECK(check_additivity(p, q));
    }
  }
  SUBCASE("q not under p is rejected") {
    const FTAlgebra a = m2_half();
    FTElement p = FTElement::zero(a, 1);
    p.block[0](0, 0) = 1.0;
    FTElement q = FTElement::zero(a, 1);
    q.block[0](1, 1) = 1.0;
    CHECK_THROWS_AS(check_additivity(FTModule{p}, FTModule{q}), ComputationError);
  }
}

TEST_CASE("monotonicity of dim under subprojections, 200 random pairs") {
  FTRandom rnd(13);
  for (int t = 0; t < 200; ++t) {
    const FTAlgebra a = rnd.algebra();
    const FTModule p = rnd.projection(a, 1 + t % 3);
    const FTModule q = rnd.subprojection(p);
    CHECK(dim_projective(q) <= dim_projective(p) + 1e-9);
  }
}

TEST_CASE("compression") {
  FTRandom rnd(17);
  SUBCASE("p = identity") {
    const FTAlgebra a = m2_half();
    const FTModule m = rnd.projection(a, 2);
    CHECK(check_compression(m, FTElement::identity(a, 1)));
  }
  SUBCASE("rank-1 compressions of random modules") {
    for (int t = 0; t < 50; ++t) {
      const FTAlgebra a = rnd.algebra();
      const FTModule m = rnd.projection(a, 1 + t % 2);
      const FTElement p = rnd.central_support_projection(a);
      CHECK(check_compression(m, p));
    }
  }
  SUBCASE("a projection missing a block is rejected") {
    FTAlgebra a;
    a.blocks = {{2, Rational(1, 2)}, {3, Rational(1, 3)}};
    const FTModule m = rnd.projection(a, 1);
    const FTElement p = rnd.central_support_projection(a, /*drop_a_block=*/true);
    CHECK_THROWS_AS(check_compression(m, p), ComputationError);
  }
}

TEST_CASE("limit formulas on periodic chains") {
  FTAlgebra m3;
  m3.blocks = {{3, Rational(1)}};
  SUBCASE("constant chain with identity maps") {
    FTChain chain;
    chain.algebra = &m3;
    chain.rank = 1;
    chain.maps = {FTElement::identity(m3, 1), FTElement::identity(m3, 1)};
    CHECK(check_limit_formulas(chain));
    CHECK(dim_image(chain.maps[0]) == doctest::Approx(3.0));
  }
  SUBCASE("chain with one zero map collapses to zero") {
    FTChain chain;
    chain.algebra = &m3;
    chain.rank = 1;
    chain.maps = {FTElement::identity(m3, 1), FTElement::zero(m3, 1),
                  FTElement::identity(m3, 1)};
    CHECK(check_limit_formulas(chain));
  }
  SUBCASE("random nested-kernel chains of length 4 over M_3") {
    FTRandom rnd(19);
    for (int t = 0; t < 40; ++t) {
      const FTChain chain = rnd.nested_kernel_chain(m3, 1, 4);
      CHECK(check_limit_formulas(chain));
    }
  }
  SUBCASE("shape mismatches are not module maps") {
    FTChain chain;
    chain.algebra = &m3;
    chain.rank = 2;
    chain.maps = {FTElement::identity(m3, 1), FTElement::identity(m3, 1)};
    CHECK_THROWS_AS(check_limit_formulas(chain), ComputationError);
  }
}

TEST_CASE("Sauer's criterion at finite scale") {
  FTRandom rnd(23);
  for (int t = 0; t < 100; ++t) {
    const FTAlgebra a = rnd.algebra();
    FTModule m = rnd.projection(a, 1);
    if (t % 3 == 0) m.projection = FTElement::zero(a, 1);
    CHECK(sauer_zero_dimension(m));
  }
}

TEST_CASE("kernel_trace on finite truncations") {
  const SpectralOptions opts;
  SUBCASE("filled triangle, n = 1: harmonic 1-space is trivial") {
    const Truncation t = make_filled_triangle_complex().level(0);
    CHECK(kernel_trace(t, 1, 1e-2, opts).value == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("bare 4-cycle, n = 1: one harmonic class") {
    const Truncation t = make_finite_cycle_complex(4).level(0);
    CHECK(kernel_trace(t, 1, 1e-2, opts).value == doctest::Approx(1.0));
  }
  SUBCASE("epsilon above the spectral radius counts every orbit weight") {
    const Truncation tri = make_filled_triangle_complex().level(0);
    CHECK(kernel_trace(tri, 1, 100.0, opts).value == doctest::Approx(3.0));
    const Truncation box = make_grid_complex(2, true).level(2);
    CHECK(kernel_trace(box, 1, 100.0, opts).value == doctest::Approx(2.0));
  }
  SUBCASE("monotone in epsilon and right-continuous off the spectrum") {
    const Truncation t = make_finite_cycle_complex(6).level(0);
    double prev = 0.0;
    for (double eps : {1e-3, 1e-1, 0.5, 1.0, 2.0, 5.0}) {
      const double v = kernel_trace(t, 1, eps, opts).value;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    const double at = kernel_trace(t, 1, 0.3, opts).value;
    const double just_right = kernel_trace(t, 1, 0.3 + 1e-9, opts).value;
    CHECK(at == doctest::Approx(just_right).epsilon(1e-12));
  }
  SUBCASE("invalid thresholds and degrees") {
    const Truncation t = make_finite_cycle_complex(4).level(0);
    CHECK_THROWS_AS(kernel_trace(t, 1, 0.0, opts), ComputationError);
    CHECK_THROWS_AS(kernel_trace(t, 3, 0.1, opts), ComputationError);
  }
  SUBCASE("truncations missing an orbit representative are rejected") {
    // The level-0 box of the plane is a single vertex; no edge orbit has a
    // representative cell yet.
    const Truncation t = make_grid_complex(2, true).level(0);
    CHECK_THROWS_WITH_AS(kernel_trace(t, 1, 0.1, opts), "domain-too-small", ComputationError);
  }
}

TEST_CASE("Euler relation: alternating kernel traces match alternating weights") {
  const SpectralOptions opts;
  for (const CofiniteComplex& c : {make_filled_triangle_complex(), make_finite_cycle_complex(5),
                                   make_finite_wedge_complex(3)}) {
    const Truncation t = c.level(0);
    double alternating = 0.0;
    for (int n = 0; n <= c.dims; ++n) {
      const double v = kernel_trace(t, n, 1e-3, opts).value;
      alternating += (n % 2 == 0) ? v : -v;
    }
    CHECK(alternating == doctest::Approx(to_double(c.euler_weight_sum())).epsilon(1e-9));
  }
}

TEST_CASE("iterative spectral masses agree with the dense path") {
  // Same truncation, dense cap forced low so Lanczos handles it.
  const Truncation t = make_wedge_cover_complex(2).level(4);
  REQUIRE(t.cell_count(1) > 300);
  SpectralOptions dense;
  SpectralOptions iterative;
  iterative.dense_cap = 10;
  const std::vector<int> cells{t.orbit_rep[1][0], t.orbit_rep[1][1]};
  const std::vector<double> eps{1e-1, 1e-2};
  const auto exact = spectral_masses(t, 1, cells, eps, true, dense);
  const auto approx = spectral_masses(t, 1, cells, eps, true, iterative);
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t e = 0; e < eps.size(); ++e) {
      CHECK(approx[c][e].point == doctest::Approx(exact[c][e].point).epsilon(5e-3));
      CHECK(approx[c][e].lower <= exact[c][e].point + 1e-9);
      CHECK(approx[c][e].upper >= exact[c][e].point - 1e-9);
    }
}

TEST_CASE("cycle space mass oracle") {
  // On a finite graph the edge space splits as star + cycle, so the exact
  // kernel mass of the edge Laplacian equals the cycle mass.
  const Truncation t = make_grid_graph(2).ball(2);
  const SpectralOptions opts;
  const std::vector<int> cells{t.orbit_rep[1][0]};
  const auto masses = spectral_masses(t, 1, cells, {1e-9}, false, opts);
  CHECK(masses[0][0].point == doctest::Approx(cycle_space_mass(t, cells[0])).epsilon(1e-7));
}

TEST_CASE("double limit estimate on finite input stabilizes to the point value") {
  const CofiniteComplex c = make_finite_cycle_complex(6);
  DoubleLimitInputs in;
  in.build = [&c](int lv) { return c.level(lv); };
  in.degree = 1;
  in.levels = {0, 1};
  in.epsilons = default_epsilon_schedule();
  in.finite = true;
  const SpectralOptions opts;
  const BettiEstimate est = double_limit_estimate(in, opts);
  CHECK(est.kind == BettiEstimate::Kind::Point);
  CHECK(est.value == doctest::Approx(kernel_trace(c.level(0), 1, 1e-3, opts).value));
}

TEST_CASE("haar homogeneity of the spectral estimates") {
  auto op = [](const Rational& scale) {
    CofiniteComplex c = make_finite_cycle_complex(4);
    c.haar_scale = scale;
    const SpectralOptions opts;
    return kernel_trace(c.level(0), 1, 1e-2, opts);
  };
  const BettiEstimate scaled = rescale_haar(op, 3);
  CHECK(scaled.value == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(rescale_haar(op, Rational(-1)), ComputationError);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(validate_schedule({}), ComputationError);
  CHECK_THROWS_AS(validate_schedule({2, 2}), ComputationError);
  CHECK_THROWS_AS(validate_schedule({3, 1}), ComputationError);
  CHECK_NOTHROW(validate_schedule({1, 2, 5}));
  CHECK_THROWS_AS(validate_epsilons({0.1, 0.2}), ComputationError);
  CHECK_THROWS_AS(validate_epsilons({-0.1}), ComputationError);
  CHECK_NOTHROW(validate_epsilons(default_epsilon_schedule()));
}
