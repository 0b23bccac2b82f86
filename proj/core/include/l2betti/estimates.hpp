#pragma once

#include <functional>
#include <string>
#include <vector>

#include "l2betti/rational.hpp"

namespace l2betti {

/// One row of the convergence ledger CSV:
/// degree, level_k, level_l, epsilon, value, kind.
struct LedgerRow {
  int degree = 0;
  int level_k = 0;
  int level_l = 0;
  double epsilon = 0.0;
  double value = 0.0;
  std::string kind;  // "point", "upper", "lower"
};

/// A Betti value with the threshold and exhaustion level it was read off at.
/// `upper` rows are certified monotone upper bounds; `lower` is the stabilized
/// spectral count, exact in gapped situations and heuristic otherwise.
struct BettiEstimate {
  enum class Kind { Point, Upper, Lower, Bracket };

  double value = 0.0;
  double epsilon = 0.0;
  int level = 0;
  Kind kind = Kind::Point;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<LedgerRow> table;

  static BettiEstimate point(double v, double eps, int level);
  static BettiEstimate bracket(double lo, double hi, double eps, int level);
  void check_invariants() const;  // value >= 0, lo <= hi
};

/// Strictly increasing positive schedule, e.g. radii or levels.
void validate_schedule(const std::vector<int>& levels);

/// Decreasing epsilon schedule; default {1e-1, 1e-2, 1e-3}.
std::vector<double> default_epsilon_schedule();
void validate_epsilons(const std::vector<double>& eps);

/// Runs `op` once as given and once with every stabilizer mass multiplied by
/// c, asserts output(c)/ (1/c) matches output(1) (exact for rational outputs,
/// 1e-12 relative for spectral ones), and returns the scaled estimate.
/// Throws ComputationError("invalid-scale") when c <= 0.
BettiEstimate rescale_haar(const std::function<BettiEstimate(const Rational& scale)>& op,
                           const Rational& c);

} // namespace l2betti
