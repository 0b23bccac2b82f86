#pragma once

#include <optional>
#include <vector>

#include "l2betti/estimates.hpp"
#include "l2betti/families.hpp"
#include "l2betti/truncation.hpp"

namespace l2betti {

struct SpectralOptions {
  int dense_cap = 2000;        // dense eigendecomposition up to this many cells
  int lanczos_steps = 260;     // iterative path: Lanczos steps with full reorthogonalization
  double kernel_floor = 1e-8;  // eigenvalues below this count as the exact kernel
  int threads = 1;             // parallel truncation levels
};

/// Spectral mass of a unit cell vector against the Hodge Laplacian
/// Delta_n = B_n^T B_n + B_{n+1} B_{n+1}^T of a truncation: the mass of
/// [0, eps), or of (kernel_floor, eps) when the exact kernel is excluded.
/// `point` is exact on the dense path and the raw Gauss-quadrature CDF on the
/// iterative path; [lower, upper] are Markov–Stieltjes bounds (one straddling
/// quadrature weight of slack per side).
struct SpectralMass {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Per-cell spectral masses below each epsilon. `exclude_exact_kernel`
/// subtracts eigenvalues below kernel_floor (the graph beta^1 path, where the
/// exact kernel is the ball cycle space and belongs to the cycle span).
std::vector<std::vector<SpectralMass>>
spectral_masses(const Truncation& t, int n, const std::vector<int>& cells_of_interest,
                const std::vector<double>& epsilons, bool exclude_exact_kernel,
                const SpectralOptions& opts);

/// Orbit-weighted trace of the spectral projection P_{<eps}(Delta_n):
/// sum over orbit representatives of (1/mu(G_s)) <P 1_s, 1_s>.
/// Errors: eps <= 0 -> "invalid-threshold"; missing representative ->
/// "domain-too-small"; n out of range -> "dimension-out-of-range".
BettiEstimate kernel_trace(const Truncation& t, int n, double eps, const SpectralOptions& opts);

/// Certified upper bound for the degree-n harmonic trace of the ambient
/// complex, evaluated on one truncation: the complement mass of
///   span{ boundaries of included (n+1)-cells }
/// + span{ coboundaries of interior (n-1)-cells }
/// at the orbit representatives. Monotone non-increasing along any nested
/// exhaustion, with limit the harmonic trace itself.
double harmonic_upper_bound(const Truncation& t, int n, const SpectralOptions& opts);

/// Same bound for graph beta^1: the cycle side is spanned by the fundamental
/// cycles of the truncation instead of (absent) 2-cells.
double graph_beta1_upper_bound(const Truncation& t, const SpectralOptions& opts);

/// Mass of the ball cycle space at a unit edge vector, computed exactly from
/// the vertex Laplacian (1 - <P_star u, u> on a finite graph).
double cycle_space_mass(const Truncation& t, int edge_index);

/// Complement mass <(I - P_span(B)) u, u> for sparse column spans.
double complement_mass(const SparseD& basis, const Eigen::VectorXd& u, int dense_cap);

struct DoubleLimitInputs {
  std::function<Truncation(int level)> build;
  int degree = 0;
  std::vector<int> levels;
  std::vector<double> epsilons;
  bool graph_mode = false;   // exclude exact kernel, use fundamental cycles
  bool finite = false;       // stabilizes immediately; report a point value
};

/// The sup-inf estimator over a truncation schedule. Per level it records the
/// certified upper bound and the epsilon-spectral counts; for pairs k < l
/// within the dense cap it also records the restriction values
/// R_{k,l} = (inclusion_k)^* P_{harmonic,l} (inclusion_k), whose image
/// dimension is read off the singular values >= 1e-8.
/// The reported value sits at the smallest epsilon whose count is stable
/// across the last two levels; the bracket pairs the best stabilized count
/// with the smallest upper bound. Orbit weights and representatives are read
/// from each truncation.
BettiEstimate double_limit_estimate(const DoubleLimitInputs& in, const SpectralOptions& opts);

} // namespace l2betti
