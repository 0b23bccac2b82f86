#pragma once

#include <vector>

#include "l2betti/estimates.hpp"
#include "l2betti/families.hpp"
#include "l2betti/spectral.hpp"

namespace l2betti {

/// Degree-n L2-Betti number of a cofinite action via the weighted harmonic
/// trace on the exhaustion. Finite complexes yield the point value; n above
/// the dimension yields an exact 0.
BettiEstimate betti_cofinite(const CofiniteComplex& c, int n, const std::vector<int>& levels,
                             const std::vector<double>& epsilons, const SpectralOptions& opts);

/// One Følner step: ordinary rational Betti number of the finite truncation
/// divided by the Følner mass, with the boundary-to-bulk quality ratio.
struct FolnerEntry {
  int k = 0;
  Rational value;          // beta_n(Gamma^(k)) / mu(F_k)
  Rational quality;        // mu(boundary_n Gamma^(k)) / mu(Gamma^(k)_n)
};

struct FolnerResult {
  std::vector<FolnerEntry> entries;
  Rational last_value;
};

/// Dodziuk–Mathai estimator along the family's Følner rule; exact rationals
/// throughout. Throws ComputationError("not-amenable-family") when the
/// complex declares no Følner rule.
FolnerResult folner_limit(const CofiniteComplex& c, int n, const std::vector<int>& ks);

/// Finite-quotient approximation: beta_n(quotient)/index per entry; no limit
/// is asserted.
std::vector<Rational> lueck_quotient_limit(
    const std::vector<std::pair<CofiniteComplex, long>>& quotients, int n);

/// Discrete convolution of two Betti sequences.
/// Throws ValidationError("invalid-betti") on negative entries.
std::vector<Rational> kunneth(const std::vector<Rational>& a, const std::vector<Rational>& b);

/// |sum (-1)^n beta_n  -  sum (-1)^n sum_s 1/mu(G_s)| within tolerance.
/// Exact rational comparison when tol == 0.
/// Throws ComputationError("incomplete-input") when degrees are missing.
bool euler_check(const CofiniteComplex& c, const std::vector<Rational>& betas);
bool euler_check_numeric(const CofiniteComplex& c, const std::vector<BettiEstimate>& betas,
                         double extra_tol = 1e-9);

/// Rational Betti numbers of a finite complex, by fraction-free integer rank.
std::vector<Rational> finite_betti_numbers(const CofiniteComplex& c);

} // namespace l2betti
