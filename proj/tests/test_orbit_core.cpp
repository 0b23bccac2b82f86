#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "l2betti/errors.hpp"
#include "l2betti/families.hpp"
#include "l2betti/integer_rank.hpp"
#include "l2betti/truncation.hpp"

using namespace l2betti;

namespace {

void check_labelled_subset(const Truncation& a, const Truncation& b) {
  for (int n = 0; n <= a.dims; ++n) {
    std::map<std::string, int> labels;
    for (const Cell& cell : b.cells[n]) labels[cell.key] = cell.orbit;
    for (const Cell& cell : a.cells[n]) {
      REQUIRE(labels.count(cell.key) == 1);
      CHECK(labels[cell.key] == cell.orbit);
    }
  }
}

} // namespace

TEST_CASE("ball counts match direct enumeration") {
  SUBCASE("radius zero is a single root vertex") {
    for (const OrbitGraph& g : {make_free_group_graph(2), make_grid_graph(2),
                                make_free_product_graph({2, 3}), make_regular_tree_graph(3)}) {
      const Truncation t = g.ball(0);
      CHECK(t.cell_count(0) == 1);
      CHECK(t.cell_count(1) == 0);
    }
  }
  SUBCASE("free group rank 2, radius 1: 5 vertices, 4 edges") {
    const Truncation t = make_free_group_graph(2).ball(1);
    CHECK(t.cell_count(0) == 5);
    CHECK(t.cell_count(1) == 4);
  }
  SUBCASE("Z^2 radius 1: 5 vertices, 4 edges") {
    const Truncation t = make_grid_graph(2).ball(1);
    CHECK(t.cell_count(0) == 5);
    CHECK(t.cell_count(1) == 4);
  }
  SUBCASE("free group ball sizes: 1 + 2(3^R - 1) vertices, tree edge count") {
    const OrbitGraph g = make_free_group_graph(2);
    long power = 1;
    for (int r = 1; r <= 5; ++r) {
      power *= 3;
      const Truncation t = g.ball(r);
      CHECK(t.cell_count(0) == 1 + 2 * (power - 1));
      CHECK(t.cell_count(1) == t.cell_count(0) - 1);
    }
  }
  SUBCASE("L1 balls of Z^2 have 2R^2 + 2R + 1 vertices and 4R^2 edges") {
    const OrbitGraph g = make_grid_graph(2);
    for (int r = 1; r <= 6; ++r) {
      const Truncation t = g.ball(r);
      CHECK(t.cell_count(0) == 2 * r * r + 2 * r + 1);
      CHECK(t.cell_count(1) == 4 * r * r);
    }
  }
  SUBCASE("(q+1)-regular tree ball, q = 3") {
    const Truncation t = make_regular_tree_graph(3).ball(2);
    CHECK(t.cell_count(0) == 1 + 4 + 4 * 3);
    CHECK(t.cell_count(1) == t.cell_count(0) - 1);
  }
}

TEST_CASE("ball nesting with identical labels") {
  for (const OrbitGraph& g : {make_free_group_graph(2), make_grid_graph(2),
                              make_free_product_graph({2, 3}), make_regular_tree_graph(3)}) {
    check_labelled_subset(g.ball(2), g.ball(3));
    check_labelled_subset(g.ball(3), g.ball(4));
  }
}

TEST_CASE("expansion range is bounded") {
  CHECK_THROWS_AS(make_free_group_graph(2).ball(1000), ComputationError);
  CHECK_THROWS_AS(make_free_group_graph(2).ball(-1), ComputationError);
}

TEST_CASE("orbit mass consistency is validated") {
  OrbitGraph g = make_free_group_graph(2);
  g.edge_orbits[1].stab = Rational(1, 3);  // arity 1 * 1/3 != 1
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("orbit 1"), ValidationError);

  // Every built-in family satisfies the invariant out of the box.
  for (const OrbitGraph& ok : {make_free_group_graph(3), make_grid_graph(3),
                               make_free_product_graph({2, 2, 2}), make_regular_tree_graph(5)})
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("boundary operators") {
  SUBCASE("triangle: 3x3 incidence with zero column sums") {
    const CofiniteComplex tri = make_explicit_graph_complex(3, {{0, 1}, {1, 2}, {0, 2}});
    const Truncation t = tri.level(0);
    const SparseInt& b = t.boundary_operator(1);
    REQUIRE(b.rows() == 3);
    REQUIRE(b.cols() == 3);
    for (int e = 0; e < 3; ++e) {
      std::int64_t sum = 0;
      int entries = 0;
      for (SparseInt::InnerIterator it(b, e); it; ++it) {
        sum += it.value();
        ++entries;
      }
      CHECK(sum == 0);
      CHECK(entries == 2);
    }
  }
  SUBCASE("single edge: column (-1, +1)") {
    const Truncation t = make_explicit_graph_complex(2, {{0, 1}}).level(0);
    const SparseInt& b = t.boundary_operator(1);
    CHECK(b.coeff(0, 0) == -1);
    CHECK(b.coeff(1, 0) == 1);
  }
  SUBCASE("out-of-range degree") {
    const Truncation t = make_grid_graph(2).ball(1);
    CHECK_THROWS_AS(t.boundary_operator(2), ComputationError);
    CHECK_THROWS_AS(t.boundary_operator(0), ComputationError);
  }
}

TEST_CASE("boundary of boundary vanishes exactly") {
  CHECK(make_grid_complex(2, true).level(8).dd_is_zero());
  CHECK(make_grid_complex(3, true).level(3).dd_is_zero());
  CHECK(make_filled_triangle_complex().level(0).dd_is_zero());
  const CofiniteComplex w2 = make_wedge_cover_complex(2);
  CHECK(product_complex(w2, w2).level(2).dd_is_zero());
  CHECK(product_complex(make_grid_complex(1, true), make_grid_complex(1, true))
            .level(4)
            .dd_is_zero());
}

TEST_CASE("star and cycle spaces") {
  SUBCASE("tree truncations have empty cycle bases") {
    const Truncation t = make_free_group_graph(2).ball(3);
    const auto bases = star_and_cycle_spaces(t, bfs_spanning_tree(t));
    CHECK(bases.cycle.cols() == 0);
  }
  SUBCASE("triangle: one fundamental cycle, star rank 2") {
    const Truncation t = make_explicit_graph_complex(3, {{0, 1}, {1, 2}, {0, 2}}).level(0);
    const auto bases = star_and_cycle_spaces(t, bfs_spanning_tree(t));
    CHECK(bases.cycle.cols() == 1);
    CHECK(integer_rank(bases.star) == 2);
    // The fundamental cycle is a genuine cycle: boundary kills it.
    SparseInt bc = t.boundary[1] * bases.cycle;
    bc.prune([](int, int, std::int64_t v) { return v != 0; });
    CHECK(bc.nonZeros() == 0);
  }
  SUBCASE("4-cycle: one fundamental cycle, star rank 3") {
    const Truncation t =
        make_explicit_graph_complex(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}).level(0);
    const auto bases = star_and_cycle_spaces(t, bfs_spanning_tree(t));
    CHECK(bases.cycle.cols() == 1);
    CHECK(integer_rank(bases.star) == 3);
  }
  SUBCASE("rank identities on a ball with many cycles") {
    const Truncation t = make_grid_graph(2).ball(3);
    const int nv = t.cell_count(0), ne = t.cell_count(1);
    const auto bases = star_and_cycle_spaces(t, bfs_spanning_tree(t));
    CHECK(integer_rank(bases.star) == nv - 1);
    CHECK(integer_rank(bases.cycle) == ne - nv + 1);
    CHECK(bases.cycle.cols() == ne - nv + 1);
    SparseInt bc = t.boundary[1] * bases.cycle;
    bc.prune([](int, int, std::int64_t v) { return v != 0; });
    CHECK(bc.nonZeros() == 0);
  }
  SUBCASE("non-spanning tree is rejected") {
    const Truncation t = make_grid_graph(2).ball(2);
    std::vector<char> empty_tree(t.cell_count(1), 0);
    CHECK_THROWS_AS(star_and_cycle_spaces(t, empty_tree), ComputationError);
  }
  SUBCASE("rank identities with several components") {
    // Triangle plus a detached edge: |V| = 5, |E| = 4, two components.
    const Truncation t =
        make_explicit_graph_complex(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}}).level(0);
    CHECK(component_count(t) == 2);
    const auto bases = star_and_cycle_spaces(t, bfs_spanning_tree(t));
    CHECK(integer_rank(bases.star) == 5 - 2);
    CHECK(integer_rank(bases.cycle) == 4 - 5 + 2);
  }
}

TEST_CASE("complex truncation counts") {
  SUBCASE("wedge cover level 0 realizes the closed fundamental domain") {
    const Truncation t = make_wedge_cover_complex(2).level(0);
    CHECK(t.cell_count(0) == 3);
    CHECK(t.cell_count(1) == 2);
    CHECK(t.orbit_rep[0][0] >= 0);
    CHECK(t.orbit_rep[1][0] >= 0);
    CHECK(t.orbit_rep[1][1] >= 0);
  }
  SUBCASE("Z^2 box exhaustion: (2k+1)^2 vertices, 2(2k+1)(2k) edges, (2k)^2 squares") {
    const CofiniteComplex plane = make_grid_complex(2, true);
    for (int k = 1; k <= 4; ++k) {
      const Truncation t = plane.level(k);
      CHECK(t.cell_count(0) == (2 * k + 1) * (2 * k + 1));
      CHECK(t.cell_count(1) == 2 * (2 * k + 1) * (2 * k));
      CHECK(t.cell_count(2) == (2 * k) * (2 * k));
    }
  }
  SUBCASE("finite complexes are their own truncation at every level") {
    const CofiniteComplex c = make_finite_cycle_complex(5);
    for (int lv : {0, 1, 7}) {
      const Truncation t = c.level(lv);
      CHECK(t.cell_count(0) == 5);
      CHECK(t.cell_count(1) == 5);
      CHECK(t.finite_total);
    }
  }
  SUBCASE("complex levels nest") {
    check_labelled_subset(make_wedge_cover_complex(2).level(1), make_wedge_cover_complex(2).level(2));
    check_labelled_subset(make_grid_complex(2, true).level(2), make_grid_complex(2, true).level(3));
  }
}

TEST_CASE("interior flags mark cells with all cofaces present") {
  const Truncation t = make_free_group_graph(2).ball(3);
  int interior = 0;
  for (int v = 0; v < t.cell_count(0); ++v) interior += t.interior[0][v];
  CHECK(interior == 1 + 2 * (9 - 1));  // vertices of the radius-2 ball

  const Truncation box = make_grid_complex(2, true).level(2);
  int interior_vertices = 0;
  for (int v = 0; v < box.cell_count(0); ++v) interior_vertices += box.interior[0][v];
  CHECK(interior_vertices == 3 * 3);  // [-1,1]^2
}

TEST_CASE("integer rank oracle: fraction-free vs known ranks") {
  // Dense Gaussian elimination over Q is the independent reference here,
  // realized on hand-checked matrices.
  std::vector<std::vector<BigInt>> m{{2, 4, 6}, {1, 2, 3}, {0, 1, 1}};
  CHECK(integer_rank(std::move(m)) == 2);
  std::vector<std::vector<BigInt>> id{{1, 0}, {0, 1}};
  CHECK(integer_rank(std::move(id)) == 2);
  std::vector<std::vector<BigInt>> zero{{0, 0}, {0, 0}};
  CHECK(integer_rank(std::move(zero)) == 0);
  // Betti over Q of the filled triangle: 1, 0, 0.
  const Truncation t = make_filled_triangle_complex().level(0);
  CHECK(betti_number(t, 0) == 1);
  CHECK(betti_number(t, 1) == 0);
  CHECK(betti_number(t, 2) == 0);
}

TEST_CASE("graph families report tree-ness") {
  CHECK(make_free_group_graph(2).is_tree());
  CHECK(make_regular_tree_graph(4).is_tree());
  CHECK(make_grid_graph(1).is_tree());
  CHECK_FALSE(make_grid_graph(2).is_tree());
  CHECK_FALSE(make_free_product_graph({3, 3}).is_tree());
  CHECK(make_explicit_graph(3, {{0, 1}, {1, 2}}).is_tree());
  CHECK_FALSE(make_explicit_graph(3, {{0, 1}, {1, 2}, {0, 2}}).is_tree());
}

TEST_CASE("product truncations") {
  SUBCASE("point x c is c") {
    const CofiniteComplex c = make_finite_cycle_complex(5);
    const CofiniteComplex p = product_complex(make_point_complex(), c);
    const Truncation t = p.level(0);
    CHECK(t.cell_count(0) == 5);
    CHECK(t.cell_count(1) == 5);
    CHECK(betti_number(t, 1) == 1);
  }
  SUBCASE("line x line matches the plane grid complex") {
    const CofiniteComplex line = make_grid_complex(1, true);
    const CofiniteComplex prod = product_complex(line, line);
    const CofiniteComplex plane = make_grid_complex(2, true);
    for (int k : {1, 2, 3}) {
      const Truncation a = prod.level(k);
      const Truncation b = plane.level(k);
      for (int n = 0; n <= 2; ++n) CHECK(a.cell_count(n) == b.cell_count(n));
      CHECK(a.dd_is_zero());
    }
  }
  SUBCASE("orbit weights multiply") {
    CofiniteComplex w = make_wedge_cover_complex(2);
    w.haar_scale = Rational(1, 2);
    const CofiniteComplex prod = product_complex(w, make_wedge_cover_complex(2));
    const Truncation t = prod.level(1);
    // degree-2 orbits: (edge, edge) pairs with masses (1/2) * 1.
    for (const Rational& mass : t.orbit_weight[2]) CHECK(mass == Rational(1, 2));
  }
  SUBCASE("oversized products are rejected") {
    CofiniteComplex w = make_wedge_cover_complex(2);
    CofiniteComplex prod = product_complex(w, w);
    prod.product_cell_cap = 100;
    CHECK_THROWS_AS(prod.level(3), ComputationError);
  }
}
