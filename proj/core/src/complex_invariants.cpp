#include "l2betti/complex_invariants.hpp"

#include <cmath>

#include "l2betti/errors.hpp"
#include "l2betti/integer_rank.hpp"

namespace l2betti {

BettiEstimate betti_cofinite(const CofiniteComplex& c, int n, const std::vector<int>& levels,
                             const std::vector<double>& epsilons, const SpectralOptions& opts) {
  if (n < 0) throw ComputationError("dimension-out-of-range");
  if (n > c.dims) return BettiEstimate::point(0.0, 0.0, levels.empty() ? 0 : levels.back());

  DoubleLimitInputs in;
  in.build = [&c](int level) { return c.level(level); };
  in.degree = n;
  in.levels = levels;
  in.epsilons = epsilons;
  in.graph_mode = false;
  in.finite = c.is_finite();
  return double_limit_estimate(in, opts);
}

FolnerResult folner_limit(const CofiniteComplex& c, int n, const std::vector<int>& ks) {
  if (!c.folner) throw ComputationError("not-amenable-family");
  validate_schedule(ks);
  if (n < 0 || n > c.dims) throw ComputationError("dimension-out-of-range");

  FolnerResult result;
  for (int k : ks) {
    const Truncation t = c.folner_truncation(k);
    const Rational folner_mass = c.folner->mass(k) * c.haar_scale;
    FolnerEntry entry;
    entry.k = k;
    entry.value = Rational(betti_number(t, n)) / folner_mass;
    const Rational bulk = t.skeleton_mass(n);
    const std::vector<Rational> boundary = c.folner_boundary_mass(k);
    entry.quality = (bulk > 0) ? boundary[n] / bulk : Rational(0);
    result.entries.push_back(entry);
  }
  result.last_value = result.entries.back().value;
  return result;
}

std::vector<Rational> lueck_quotient_limit(
    const std::vector<std::pair<CofiniteComplex, long>>& quotients, int n) {
  if (quotients.empty()) throw ComputationError("invalid-schedule");
  long prev_index = 0;
  std::vector<Rational> out;
  for (const auto& [complex, index] : quotients) {
    if (index <= prev_index) throw ComputationError("invalid-schedule");
    prev_index = index;
    if (!complex.is_finite()) throw ValidationError("quotient complexes must be finite");
    const Truncation t = complex.level(0);
    out.push_back(Rational(betti_number(t, n)) / index);
  }
  return out;
}

std::vector<Rational> kunneth(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  for (const Rational& v : a)
    if (v < 0) throw ValidationError("invalid-betti");
  for (const Rational& v : b)
    if (v < 0) throw ValidationError("invalid-betti");
  if (a.empty() || b.empty()) return {};
  std::vector<Rational> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<Rational> finite_betti_numbers(const CofiniteComplex& c) {
  if (!c.is_finite()) throw ValidationError("finite complex required");
  const Truncation t = c.level(0);
  std::vector<Rational> out;
  for (int n = 0; n <= c.dims; ++n) out.push_back(betti_number(t, n));
  return out;
}

bool euler_check(const CofiniteComplex& c, const std::vector<Rational>& betas) {
  if (static_cast<int>(betas.size()) < c.dims + 1) throw ComputationError("incomplete-input");
  Rational alternating = 0;
  for (std::size_t n = 0; n < betas.size(); ++n)
    alternating += (n % 2 == 0) ? betas[n] : -betas[n];
  return alternating == c.euler_weight_sum();
}

bool euler_check_numeric(const CofiniteComplex& c, const std::vector<BettiEstimate>& betas,
                         double extra_tol) {
  if (static_cast<int>(betas.size()) < c.dims + 1) throw ComputationError("incomplete-input");
  double alternating = 0.0, slack = extra_tol;
  for (std::size_t n = 0; n < betas.size(); ++n) {
    alternating += (n % 2 == 0) ? betas[n].value : -betas[n].value;
    if (betas[n].kind == BettiEstimate::Kind::Bracket) slack += betas[n].hi - betas[n].lo;
  }
  return std::abs(alternating - to_double(c.euler_weight_sum())) <= slack;
}

} // namespace l2betti
