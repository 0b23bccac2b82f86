#pragma once

#include <vector>

#include "l2betti/rational.hpp"

namespace l2betti {

/// BN-pair chamber data: rank n means n+1 Weyl generators; each panel's
/// stabilizer splits into panel_splits[i] cosets of B (default q+1), with
/// mu(B) = 1.
struct ChamberData {
  int rank = 1;                      // n
  long q = 2;                        // residue field cardinality
  std::vector<Rational> panel_splits;  // size rank+1; empty means all q+1

  void validate() const;  // q >= 2, splits >= 2
  std::vector<Rational> splits() const;
};

/// 1 - sum over the n+1 panels of 1/split. For uniform splits this is
/// (q - n)/(q + 1); positive exactly when q > n.
Rational top_degree_lower_bound(const ChamberData& cd);

/// Transfer to a lattice: covolume * beta.
Rational lattice_rescale(const Rational& beta_g, const Rational& covolume);

/// beta^1 of the (q+1)-regular building tree from declared panel data:
/// chamber mass 1, two panel orbits of mass q+1 each, so 1 - 2/(q+1).
/// Throws ValidationError("invalid-q") for q < 2.
Rational tree_building_beta1(long q);

} // namespace l2betti
