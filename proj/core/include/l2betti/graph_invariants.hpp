#pragma once

#include <vector>

#include "l2betti/estimates.hpp"
#include "l2betti/families.hpp"
#include "l2betti/spectral.hpp"

namespace l2betti {

/// First L2-Betti number of a weighted vertex-transitive graph via the
/// harmonic-projection formula: on each ball, the star span (coboundaries)
/// and cycle span (fundamental cycles) are removed and the defect is summed
/// over the root's neighbors with the orbit weights; the double-limit
/// machinery turns the per-radius values into a bracket.
BettiEstimate beta1_graph(const OrbitGraph& g, const std::vector<int>& radii,
                          const std::vector<double>& epsilons, const SpectralOptions& opts);

/// Closed form for trees: (sum over unordered edge orbits of 1/mu(G_e)) - 1.
/// Throws ComputationError("not-a-tree") on graphs with cycles.
Rational beta1_tree_closed_form(const OrbitGraph& g);

/// Zeroth L2-Betti number: exactly 1/(total vertex mass) for finite inputs,
/// a strictly shrinking sequence of upper bounds 1/(ball mass) otherwise.
BettiEstimate beta0_graph(const OrbitGraph& g, const std::vector<int>& radii);
BettiEstimate beta0_complex(const CofiniteComplex& c, const std::vector<int>& levels);

/// Exact rationals backing the beta0 brackets (1/mass per level).
std::vector<Rational> beta0_upper_sequence(const OrbitGraph& g, const std::vector<int>& radii);

} // namespace l2betti
