#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "l2betti/rational.hpp"
#include "l2betti/truncation.hpp"

namespace l2betti {

/// One unordered edge orbit of a quasi-transitive graph. `arity` is the number
/// of neighbors of the root reached by the stored orientation of the orbit,
/// `stab` the Haar mass of an ordered-edge stabilizer (root stabilizer mass is
/// normalized to 1). An orbit closed under edge reversal is stored once with
/// `flipped` set; a non-flipped entry implicitly carries its mirror orbit.
struct EdgeOrbit {
  int arity = 1;
  Rational stab = 1;
  bool flipped = false;
};

struct FreeGroupFamily { int rank = 2; };
struct GridGraphFamily { int dim = 2; };
struct FreeProductFamily { std::vector<int> orders; };  // cyclic factor orders
struct RegularTreeFamily { int q = 2; };                // (q+1)-regular
struct ExplicitGraphFamily {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;               // unordered, u < v unless loop
};

using GraphFamily = std::variant<FreeGroupFamily, GridGraphFamily, FreeProductFamily,
                                 RegularTreeFamily, ExplicitGraphFamily>;

/// A weighted vertex-transitive graph described by its edge-orbit data at the
/// root plus a deterministic ball expander. Root stabilizer mass is 1.
struct OrbitGraph {
  GraphFamily family;
  std::vector<EdgeOrbit> edge_orbits;
  Rational haar_scale = 1;  // multiplies every stabilizer mass

  /// Rooted ball of the given radius with all edges between included
  /// vertices. Deterministic cell order; ball R is a prefix of ball R+1.
  /// Throws ComputationError("expansion-unavailable") past the family's range.
  Truncation ball(int radius) const;

  bool is_tree() const;
  bool is_finite() const;
  int root_degree() const;

  /// Unordered-orbit stabilizer mass: stab * (flipped ? 2 : 1), Haar-scaled.
  Rational unordered_orbit_mass(int orbit) const;

  /// arity * stab == root mass for every orbit.
  /// Throws ValidationError naming the offending orbit otherwise.
  void validate() const;
};

OrbitGraph make_free_group_graph(int rank);
OrbitGraph make_grid_graph(int dim);
OrbitGraph make_free_product_graph(std::vector<int> orders);
OrbitGraph make_regular_tree_graph(int q);
OrbitGraph make_explicit_graph(int vertex_count, std::vector<std::pair<int, int>> edges);

/// Følner exhaustion metadata for amenable families.
struct FolnerRule {
  std::string name;  // "boxes"
  int dim = 1;
  Rational mass(int k) const;  // mu(F_k) = k^dim
};

struct WedgeCoverFamily { int rank = 2; };       // universal cover of a wedge of circles
struct GridComplexFamily { int dim = 2; bool filled = true; };
struct FiniteCWFamily {
  std::vector<std::vector<Cell>> cells;
  std::vector<SparseInt> boundary;
  std::vector<std::vector<Rational>> orbit_weight;
};
struct ProductFamily;  // forward; holds two sub-complexes

class CofiniteComplex;
using ComplexFamily =
    std::variant<WedgeCoverFamily, GridComplexFamily, FiniteCWFamily, std::shared_ptr<ProductFamily>>;

/// Per-dimension simplex-orbit representatives with stabilizer masses, plus a
/// deterministic exhaustion generator. Everything is immutable once built.
class CofiniteComplex {
public:
  ComplexFamily family;
  int dims = 0;
  std::vector<std::vector<Rational>> orbit_stab;  // per dim, per orbit
  std::optional<FolnerRule> folner;
  Rational haar_scale = 1;
  std::size_t product_cell_cap = 50000;

  /// Finite truncation at exhaustion level i (level i is contained in level
  /// i+1). For finite complexes every level is the complex itself.
  Truncation level(int i) const;

  /// Følner truncation Gamma^(k) = F_k . closure(L), together with the
  /// boundary cell counts per dimension (Gamma_n minus F_k . L_n).
  Truncation folner_truncation(int k) const;
  std::vector<Rational> folner_boundary_mass(int k) const;

  bool is_finite() const;

  /// Closed-form L2-Betti sequence when the family has one
  /// (trees, free-abelian grids, finite complexes do not report here).
  std::optional<std::vector<Rational>> exact_betti() const;

  /// Sum over n of (-1)^n Sum_{orbits} 1/mu(G_s).
  Rational euler_weight_sum() const;

  /// Total vertex-orbit... total stabilizer mass of the vertex set for finite
  /// complexes (beta^0 denominator). Infinite families use ball masses.
  Rational total_vertex_mass() const;

  Rational scaled_stab(int dim, int orbit) const { return orbit_stab[dim][orbit] * haar_scale; }
};

struct ProductFamily {
  CofiniteComplex left;
  CofiniteComplex right;
};

CofiniteComplex make_wedge_cover_complex(int rank);
CofiniteComplex make_grid_complex(int dim, bool filled);
CofiniteComplex make_finite_cycle_complex(int m);
CofiniteComplex make_finite_wedge_complex(int circles);
CofiniteComplex make_filled_triangle_complex();
CofiniteComplex make_point_complex();
CofiniteComplex make_explicit_graph_complex(int vertex_count,
                                            std::vector<std::pair<int, int>> edges);

/// Cell product with the Leibniz sign rule; orbit masses multiply.
/// Throws ComputationError("product-too-large") when a truncation would
/// exceed the configured cell cap.
CofiniteComplex product_complex(const CofiniteComplex& a, const CofiniteComplex& b);

/// Graphs reinterpreted as 1-dimensional complexes (for betti-complex flows).
CofiniteComplex complex_of_graph(const OrbitGraph& g);

} // namespace l2betti
