#include "l2betti/estimates.hpp"

#include <cmath>

#include "l2betti/errors.hpp"

namespace l2betti {

BettiEstimate BettiEstimate::point(double v, double eps, int level) {
  BettiEstimate e;
  e.value = v;
  e.epsilon = eps;
  e.level = level;
  e.kind = Kind::Point;
  e.lo = e.hi = v;
  return e;
}

BettiEstimate BettiEstimate::bracket(double lo, double hi, double eps, int level) {
  BettiEstimate e;
  e.value = 0.5 * (lo + hi);
  e.epsilon = eps;
  e.level = level;
  e.kind = Kind::Bracket;
  e.lo = lo;
  e.hi = hi;
  return e;
}

void BettiEstimate::check_invariants() const {
  if (value < -1e-12) throw ComputationError("negative Betti estimate");
  if (kind == Kind::Bracket && lo > hi + 1e-12) throw ComputationError("inverted bracket");
}

void validate_schedule(const std::vector<int>& levels) {
  if (levels.empty()) throw ComputationError("invalid-schedule");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0) throw ComputationError("invalid-schedule");
    if (i > 0 && levels[i] <= levels[i - 1]) throw ComputationError("invalid-schedule");
  }
}

std::vector<double> default_epsilon_schedule() { return {1e-1, 1e-2, 1e-3}; }

void validate_epsilons(const std::vector<double>& eps) {
  if (eps.empty()) throw ComputationError("invalid-threshold");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i] <= 0) throw ComputationError("invalid-threshold");
    if (i > 0 && eps[i] >= eps[i - 1]) throw ComputationError("invalid-threshold");
  }
}

namespace {
bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}
} // namespace

BettiEstimate rescale_haar(const std::function<BettiEstimate(const Rational& scale)>& op,
                           const Rational& c) {
  if (c <= 0) throw ComputationError("invalid-scale");
  const BettiEstimate base = op(Rational(1));
  const BettiEstimate scaled = op(c);
  const double inv_c = to_double(Rational(1) / c);
  if (!close_rel(scaled.value, base.value * inv_c, 1e-12) ||
      !close_rel(scaled.lo, base.lo * inv_c, 1e-12) ||
      !close_rel(scaled.hi, base.hi * inv_c, 1e-12)) {
    throw ComputationError("haar-homogeneity violated");
  }
  return scaled;
}

} // namespace l2betti
