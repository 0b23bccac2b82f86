#include "l2betti/buildings.hpp"

#include "l2betti/errors.hpp"

namespace l2betti {

void ChamberData::validate() const {
  if (rank < 1) throw ValidationError("rank must be >= 1");
  if (q < 2) throw ValidationError("invalid-q");
  if (!panel_splits.empty() && static_cast<int>(panel_splits.size()) != rank + 1)
    throw ValidationError("need one panel split per face (rank + 1)");
  for (const Rational& s : panel_splits)
    if (s < 2) throw ValidationError("panel splits must be >= 2");
}

std::vector<Rational> ChamberData::splits() const {
  if (!panel_splits.empty()) return panel_splits;
  return std::vector<Rational>(rank + 1, Rational(q + 1));
}

Rational top_degree_lower_bound(const ChamberData& cd) {
  cd.validate();
  Rational bound = 1;
  for (const Rational& s : cd.splits()) bound -= Rational(1) / s;
  return bound;
}

Rational lattice_rescale(const Rational& beta_g, const Rational& covolume) {
  if (covolume <= 0) throw ValidationError("covolume must be positive");
  return beta_g * covolume;
}

Rational tree_building_beta1(long q) {
  if (q < 2) throw ValidationError("invalid-q");
  // Chamber (edge) mass 1; each of the two panel orbits has stabilizer mass
  // q+1, so beta^1 = 1 - 2/(q+1) = (q-1)/(q+1).
  return Rational(1) - Rational(2, q + 1);
}

} // namespace l2betti
