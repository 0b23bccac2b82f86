#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <vector>

#include "l2betti/rational.hpp"

namespace l2betti {

using SparseInt = Eigen::SparseMatrix<std::int64_t>;
using SparseD = Eigen::SparseMatrix<double>;

/// One cell of a finite truncation. The key is the expander-canonical name of
/// the cell; it is identical across truncation levels, which is what makes
/// nesting checks and chain-space restrictions possible.
struct Cell {
  std::string key;
  int orbit = 0;
};

/// A finite, oriented chunk of a graph or complex: per-dimension cell lists,
/// signed integer boundary operators, orbit labels and stabilizer masses.
///
/// Cells are CW-style: a boundary column may have any integer entries (loops
/// get a zero column, squares the Leibniz signs). Simplicial families store
/// each cell's vertex list in expander-canonical order and derive signs from
/// permutation parity.
struct Truncation {
  int dims = 0;
  std::vector<std::vector<Cell>> cells;        // size dims+1
  std::vector<SparseInt> boundary;             // boundary[n] : C_n -> C_{n-1}; [0] empty
  std::vector<std::vector<char>> interior;     // all cofaces of the cell are present
  std::vector<std::vector<Rational>> orbit_weight; // per dim, per orbit: unordered stabilizer mass
  std::vector<std::vector<int>> orbit_rep;     // per dim, per orbit: cell index, -1 when absent
  bool finite_total = false;                   // the truncation is the whole complex

  int cell_count(int n) const {
    return (n >= 0 && n <= dims) ? static_cast<int>(cells[n].size()) : 0;
  }

  /// Signed incidence operator C_n -> C_{n-1} in exact integer arithmetic.
  /// Throws ComputationError("dimension-out-of-range") unless 1 <= n <= dims.
  const SparseInt& boundary_operator(int n) const;

  /// boundary[n-1] * boundary[n] == 0, exactly.
  bool dd_is_zero() const;

  /// Total stabilizer mass of the dimension-n skeleton, sum of 1/1 weights per cell.
  Rational skeleton_mass(int n) const;

  /// Sum over orbits realized in dimension n of 1/mu(G_s).  Missing orbits
  /// contribute nothing.
  Rational weighted_orbit_count(int n) const;
};

/// Star and cycle bases for a graph truncation (dims == 1).
///
/// star: columns are coboundaries of vertex indicator functions, restricted to
/// the truncation's edges. cycle: one column per non-tree unordered edge, the
/// alternating indicator of its fundamental cycle in `tree_edges`.
struct StarCycleBases {
  SparseInt star;   // |E| x |V|
  SparseInt cycle;  // |E| x (#non-tree edges)
};

/// `tree_edges[i]` marks edge i as belonging to the spanning tree.
/// Throws ComputationError("invalid-tree") when the marked edges do not span.
StarCycleBases star_and_cycle_spaces(const Truncation& t, const std::vector<char>& tree_edges);

/// Breadth-first spanning tree from vertex 0 in cell order. `reverse_ties`
/// flips the neighbor visit order; the resulting invariants must not depend
/// on it.
std::vector<char> bfs_spanning_tree(const Truncation& t, bool reverse_ties = false);

/// Number of connected components of a graph truncation.
int component_count(const Truncation& t);

} // namespace l2betti
