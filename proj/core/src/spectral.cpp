#include "l2betti/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <future>
#include <map>
#include <optional>

#include "l2betti/errors.hpp"

namespace l2betti {

namespace {

SparseD hodge_laplacian(const Truncation& t, int n) {
  const int dim_n = t.cell_count(n);
  SparseD lap(dim_n, dim_n);
  if (n >= 1 && t.boundary[n].cols() > 0) {
    SparseD b = t.boundary[n].cast<double>();
    lap += SparseD(b.transpose()) * b;
  }
  if (n + 1 <= t.dims && t.boundary[n + 1].cols() > 0) {
    SparseD b = t.boundary[n + 1].cast<double>();
    lap += b * SparseD(b.transpose());
  }
  return lap;
}

struct DenseSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

DenseSpectrum dense_spectrum(const SparseD& lap) {
  const Eigen::MatrixXd dense(lap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) throw ComputationError("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Lanczos with full reorthogonalization started at the unit vector u; the
/// Ritz pairs of the tridiagonal are the Gauss quadrature of the spectral
/// measure of A at u.
Quadrature lanczos_quadrature(const SparseD& A, const Eigen::VectorXd& u, int steps) {
  const int n = static_cast<int>(A.rows());
  const int m = std::min(steps, n);
  Eigen::MatrixXd Q(n, m);
  Eigen::VectorXd alpha(m), beta(m);
  int k = 0;
  Eigen::VectorXd q = u.normalized();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
  double b = 0.0;
  for (; k < m; ++k) {
    Q.col(k) = q;
    Eigen::VectorXd w = A * q - b * prev;
    alpha[k] = q.dot(w);
    w -= alpha[k] * q;
    // Full reorthogonalization, twice is enough.
    w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * w);
    w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * w);
    b = w.norm();
    beta[k] = b;
    if (b < 1e-13) {
      ++k;
      break;
    }
    prev = q;
    q = w / b;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Quadrature q_out;
  q_out.nodes.resize(k);
  q_out.weights.resize(k);
  for (int i = 0; i < k; ++i) {
    q_out.nodes[i] = es.eigenvalues()[i];
    q_out.weights[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return q_out;
}

struct CdfBracket {
  double point = 0.0;  // raw Gauss CDF
  double lo = 0.0;
  double hi = 0.0;
};

/// Markov–Stieltjes style bracket for F(t) = mass of [0, t): the Gauss CDF is
/// exact up to one straddling quadrature weight on each side.
CdfBracket quadrature_cdf(const Quadrature& q, double t) {
  double below = 0.0, last_below = 0.0, first_above = 0.0;
  bool have_above = false;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    if (q.nodes[i] < t) {
      below += q.weights[i];
      last_below = q.weights[i];
    } else if (!have_above) {
      first_above = q.weights[i];
      have_above = true;
    }
  }
  return {below, std::max(0.0, below - last_below), std::min(1.0, below + first_above)};
}

double solve_complement_cg(const SparseD& B, const Eigen::VectorXd& u) {
  // <(I - P_col(B)) u, u> = |u|^2 - rhs . x with (B^T B) x = rhs. The normal
  // matrix may be singular but the system is consistent; plain CG applies.
  const Eigen::VectorXd rhs = B.transpose() * u;
  if (rhs.norm() < 1e-14) return u.squaredNorm();
  const SparseD N = SparseD(B.transpose()) * B;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N.rows());
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double tol2 = 1e-26 * rs;
  const int maxit = 40 * static_cast<int>(N.rows()) + 100;
  for (int it = 0; it < maxit && rs > tol2; ++it) {
    const Eigen::VectorXd Np = N * p;
    const double denom = p.dot(Np);
    if (denom <= 0) break;
    const double a = rs / denom;
    x += a * p;
    r -= a * Np;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return std::max(0.0, u.squaredNorm() - rhs.dot(x));
}

double dense_complement(const Eigen::MatrixXd& B, const Eigen::VectorXd& u) {
  if (B.cols() == 0) return u.squaredNorm();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  if (rank == 0) return u.squaredNorm();
  Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), rank);
  const Eigen::VectorXd c = q1.transpose() * u;
  return std::max(0.0, u.squaredNorm() - c.squaredNorm());
}

} // namespace

double complement_mass(const SparseD& basis, const Eigen::VectorXd& u, int dense_cap) {
  if (basis.rows() <= dense_cap) return dense_complement(Eigen::MatrixXd(basis), u);
  return solve_complement_cg(basis, u);
}

std::vector<std::vector<SpectralMass>>
spectral_masses(const Truncation& t, int n, const std::vector<int>& cells_of_interest,
                const std::vector<double>& epsilons, bool exclude_exact_kernel,
                const SpectralOptions& opts) {
  const SparseD lap = hodge_laplacian(t, n);
  const int dim_n = t.cell_count(n);
  std::vector<std::vector<SpectralMass>> out(cells_of_interest.size(),
                                             std::vector<SpectralMass>(epsilons.size()));
  if (dim_n == 0) return out;

  if (dim_n <= opts.dense_cap) {
    const DenseSpectrum sp = dense_spectrum(lap);
    for (std::size_t c = 0; c < cells_of_interest.size(); ++c) {
      for (std::size_t e = 0; e < epsilons.size(); ++e) {
        double mass = 0.0;
        for (int i = 0; i < sp.values.size(); ++i) {
          const double lam = sp.values[i];
          if (lam >= epsilons[e]) continue;
          if (exclude_exact_kernel && lam < opts.kernel_floor) continue;
          const double comp = sp.vectors(cells_of_interest[c], i);
          mass += comp * comp;
        }
        out[c][e] = {mass, mass, mass};
      }
    }
    return out;
  }

  for (std::size_t c = 0; c < cells_of_interest.size(); ++c) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim_n);
    u[cells_of_interest[c]] = 1.0;
    const Quadrature q = lanczos_quadrature(lap, u, opts.lanczos_steps);
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      CdfBracket at_eps = quadrature_cdf(q, epsilons[e]);
      if (exclude_exact_kernel) {
        const CdfBracket at_floor = quadrature_cdf(q, opts.kernel_floor);
        out[c][e] = {std::max(0.0, at_eps.point - at_floor.point),
                     std::max(0.0, at_eps.lo - at_floor.hi),
                     std::max(0.0, at_eps.hi - at_floor.lo)};
      } else {
        out[c][e] = {at_eps.point, at_eps.lo, at_eps.hi};
      }
    }
  }
  return out;
}

namespace {

struct RepSet {
  std::vector<int> cells;
  std::vector<Rational> inv_weights;
};

RepSet representatives(const Truncation& t, int n) {
  RepSet reps;
  for (std::size_t o = 0; o < t.orbit_weight[n].size(); ++o) {
    const int cell = t.orbit_rep[n][o];
    if (cell < 0) throw ComputationError("domain-too-small");
    reps.cells.push_back(cell);
    reps.inv_weights.push_back(Rational(1) / t.orbit_weight[n][o]);
  }
  return reps;
}

double weighted_sum(const RepSet& reps, const std::vector<double>& terms) {
  double total = 0.0;
  for (std::size_t i = 0; i < reps.cells.size(); ++i)
    total += to_double(reps.inv_weights[i]) * terms[i];
  return total;
}

SparseD interior_coboundary_columns(const Truncation& t, int n) {
  // Coboundary columns boundary[n]^T restricted to interior (n-1)-cells.
  if (n < 1) return SparseD(t.cell_count(n), 0);
  SparseD cob = SparseD(t.boundary[n].cast<double>().transpose());
  std::vector<int> keep;
  for (int f = 0; f < t.cell_count(n - 1); ++f)
    if (t.interior[n - 1][f]) keep.push_back(f);
  SparseD out(t.cell_count(n), static_cast<int>(keep.size()));
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t j = 0; j < keep.size(); ++j)
    for (SparseD::InnerIterator it(cob, keep[j]); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseD hstack(const SparseD& a, const SparseD& b) {
  SparseD out(a.rows(), a.cols() + b.cols());
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseD::InnerIterator it(a, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < b.outerSize(); ++k)
    for (SparseD::InnerIterator it(b, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), a.cols() + static_cast<int>(it.col()), it.value());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double complement_value(const Truncation& t, int n, const SparseD& basis, const RepSet& reps,
                        const SpectralOptions& opts) {
  std::vector<double> terms(reps.cells.size());
  for (std::size_t i = 0; i < reps.cells.size(); ++i) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(t.cell_count(n));
    u[reps.cells[i]] = 1.0;
    terms[i] = complement_mass(basis, u, opts.dense_cap);
  }
  return weighted_sum(reps, terms);
}

} // namespace

double harmonic_upper_bound(const Truncation& t, int n, const SpectralOptions& opts) {
  const RepSet reps = representatives(t, n);
  SparseD basis(t.cell_count(n), 0);
  if (n + 1 <= t.dims) basis = t.boundary[n + 1].cast<double>();
  if (n >= 1) basis = hstack(basis, interior_coboundary_columns(t, n));
  return complement_value(t, n, basis, reps, opts);
}

double graph_beta1_upper_bound(const Truncation& t, const SpectralOptions& opts) {
  if (t.dims != 1) throw ComputationError("dimension-out-of-range");
  const RepSet reps = representatives(t, 1);
  const StarCycleBases bases = star_and_cycle_spaces(t, bfs_spanning_tree(t));
  SparseD basis = hstack(bases.cycle.cast<double>(), interior_coboundary_columns(t, 1));
  return complement_value(t, 1, basis, reps, opts);
}

double cycle_space_mass(const Truncation& t, int edge_index) {
  // Star and cycle space decompose the edge space of a finite graph
  // orthogonally, so the cycle mass is 1 minus the star mass, and the star
  // mass solves a vertex Laplacian system.
  const SparseD b1 = t.boundary[1].cast<double>();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(t.cell_count(1));
  u[edge_index] = 1.0;
  const double comp = solve_complement_cg(SparseD(b1.transpose()), u);
  return comp;
}

BettiEstimate kernel_trace(const Truncation& t, int n, double eps, const SpectralOptions& opts) {
  if (eps <= 0) throw ComputationError("invalid-threshold");
  if (n < 0 || n > t.dims) throw ComputationError("dimension-out-of-range");
  const RepSet reps = representatives(t, n);
  const auto masses = spectral_masses(t, n, reps.cells, {eps}, false, opts);
  std::vector<double> terms(reps.cells.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = masses[i][0].point;
  BettiEstimate est = BettiEstimate::point(weighted_sum(reps, terms), eps, 0);
  if (!t.finite_total) {
    est.kind = BettiEstimate::Kind::Bracket;
    est.lo = 0.0;
    est.hi = est.value;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      lo += to_double(reps.inv_weights[i]) * masses[i][0].lower;
      hi += to_double(reps.inv_weights[i]) * masses[i][0].upper;
    }
    est.lo = lo;
    est.hi = hi;
  }
  est.check_invariants();
  return est;
}

namespace {

struct LevelData {
  int level = 0;
  Truncation trunc;
  double upper = 0.0;
  std::vector<std::vector<SpectralMass>> masses;  // reps x epsilons
  std::vector<double> values;                     // per epsilon, weighted point
  std::vector<double> lows, highs;                // per epsilon, weighted bracket
  std::optional<Eigen::VectorXd> evals;           // dense path only
  std::optional<Eigen::MatrixXd> evecs;
};

LevelData compute_level(const DoubleLimitInputs& in, int level, const SpectralOptions& opts) {
  LevelData d;
  d.level = level;
  d.trunc = in.build(level);
  const int n = in.degree;
  if (n > d.trunc.dims || d.trunc.cell_count(n) == 0) {
    d.values.assign(in.epsilons.size(), 0.0);
    d.lows = d.highs = d.values;
    return d;
  }
  const RepSet reps = representatives(d.trunc, n);

  d.upper = in.graph_mode ? graph_beta1_upper_bound(d.trunc, opts)
                          : harmonic_upper_bound(d.trunc, n, opts);

  d.masses = spectral_masses(d.trunc, n, reps.cells, in.epsilons, in.graph_mode, opts);
  d.values.resize(in.epsilons.size());
  d.lows.resize(in.epsilons.size());
  d.highs.resize(in.epsilons.size());
  for (std::size_t e = 0; e < in.epsilons.size(); ++e) {
    double v = 0, lo = 0, hi = 0;
    for (std::size_t i = 0; i < reps.cells.size(); ++i) {
      const double w = to_double(reps.inv_weights[i]);
      v += w * d.masses[i][e].point;
      lo += w * d.masses[i][e].lower;
      hi += w * d.masses[i][e].upper;
    }
    d.values[e] = v;
    d.lows[e] = lo;
    d.highs[e] = hi;
  }
  if (d.trunc.cell_count(n) <= opts.dense_cap) {
    const DenseSpectrum sp = dense_spectrum(hodge_laplacian(d.trunc, n));
    d.evals = sp.values;
    d.evecs = sp.vectors;
  }
  return d;
}

/// Trace at the level-k representatives of the range projection of
/// R_{k,l} = (inclusion_k)^* P_{harmonic(eps), l} (inclusion_k).
double restriction_value(const LevelData& lk, const LevelData& ll, int degree, double eps,
                         bool graph_mode, const SpectralOptions& opts) {
  const int n = degree;
  // Eigenvectors of the level-l Laplacian spanning the eps-harmonic space.
  std::vector<int> picked;
  for (int i = 0; i < ll.evals->size(); ++i) {
    const double lam = (*ll.evals)[i];
    if (lam >= eps) continue;
    if (graph_mode && lam < opts.kernel_floor) continue;
    picked.push_back(i);
  }
  if (picked.empty()) return 0.0;

  std::map<std::string, int> l_index;
  for (int c = 0; c < ll.trunc.cell_count(n); ++c) l_index[ll.trunc.cells[n][c].key] = c;

  const int nk = lk.trunc.cell_count(n);
  Eigen::MatrixXd restricted(nk, static_cast<int>(picked.size()));
  for (int c = 0; c < nk; ++c) {
    const int row = l_index.at(lk.trunc.cells[n][c].key);
    for (std::size_t j = 0; j < picked.size(); ++j)
      restricted(c, static_cast<int>(j)) = (*ll.evecs)(row, picked[j]);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(restricted, Eigen::ComputeThinU);
  const RepSet reps = representatives(lk.trunc, n);
  std::vector<double> terms(reps.cells.size(), 0.0);
  for (int j = 0; j < svd.singularValues().size(); ++j) {
    if (svd.singularValues()[j] < 1e-8) continue;
    for (std::size_t i = 0; i < reps.cells.size(); ++i) {
      const double comp = svd.matrixU()(reps.cells[i], j);
      terms[i] += comp * comp;
    }
  }
  return weighted_sum(reps, terms);
}

} // namespace

BettiEstimate double_limit_estimate(const DoubleLimitInputs& in, const SpectralOptions& opts) {
  if (in.levels.size() < (in.finite ? 1u : 2u)) throw ComputationError("invalid-schedule");
  validate_schedule(in.levels);
  validate_epsilons(in.epsilons);

  std::vector<LevelData> levels(in.levels.size());
  if (opts.threads > 1) {
    std::vector<std::future<LevelData>> jobs;
    jobs.reserve(in.levels.size());
    for (int lv : in.levels)
      jobs.push_back(std::async(std::launch::async,
                                [&in, lv, &opts] { return compute_level(in, lv, opts); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) levels[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < in.levels.size(); ++i)
      levels[i] = compute_level(in, in.levels[i], opts);
  }

  BettiEstimate est;
  auto add_row = [&est](int degree, int k, int l, double eps, double value, const char* kind) {
    est.table.push_back({degree, k, l, eps, value, kind});
  };

  for (const LevelData& d : levels) {
    add_row(in.degree, d.level, d.level, 0.0, d.upper, "upper");
    for (std::size_t e = 0; e < in.epsilons.size(); ++e)
      add_row(in.degree, d.level, d.level, in.epsilons[e], d.values[e], "point");
  }
  for (std::size_t a = 0; a < levels.size(); ++a) {
    for (std::size_t b = a + 1; b < levels.size(); ++b) {
      if (!levels[a].evals || !levels[b].evals) continue;
      if (levels[a].trunc.cell_count(in.degree) == 0) continue;
      for (double eps : in.epsilons) {
        const double v =
            restriction_value(levels[a], levels[b], in.degree, eps, in.graph_mode, opts);
        add_row(in.degree, levels[a].level, levels[b].level, eps, v, "point");
      }
    }
  }

  const LevelData& last = levels.back();
  if (in.finite) {
    est.value = last.values.empty() ? 0.0 : last.values.back();
    est.epsilon = in.epsilons.empty() ? 0.0 : in.epsilons.back();
    est.level = last.level;
    est.kind = BettiEstimate::Kind::Point;
    est.check_invariants();
    return est;
  }

  // Reported value: smallest epsilon whose count is stable across the last
  // two levels and epsilon-independent against the next larger threshold
  // (counts freeze once epsilon sits below the spectral gap). When nothing
  // has stabilized the tightest threshold is reported, as the closest proxy
  // for the kernel limit.
  auto stable = [](double v, double w) { return std::abs(v - w) <= std::max(0.005, 0.05 * std::abs(v)); };
  std::size_t chosen = in.epsilons.size() - 1;
  if (levels.size() >= 2) {
    const LevelData& prev = levels[levels.size() - 2];
    for (std::size_t e = in.epsilons.size(); e-- > 0;) {
      if (!stable(last.values[e], prev.values[e])) continue;
      if (e > 0 && !stable(last.values[e], last.values[e - 1])) continue;
      chosen = e;
      break;
    }
  }

  double hi = levels.front().upper;
  for (const LevelData& d : levels) hi = std::min(hi, d.upper);

  // Lower end: the stabilized count minus its convergence spread. The spread
  // is read off the loosest-threshold series (whose counts exist at every
  // level) over the last two level increments, plus the threshold spread at
  // the final level. The certified upper bound wins when the count
  // overshoots.
  const double value = last.values.empty() ? 0.0 : last.values[chosen];
  double margin = std::abs(value - last.values[0]);
  if (levels.size() >= 3) {
    const LevelData& prev = levels[levels.size() - 2];
    const LevelData& prev2 = levels[levels.size() - 3];
    margin += std::abs(last.values[0] - prev.values[0]) +
              std::abs(prev.values[0] - prev2.values[0]) +
              std::max(0.0, prev.upper - last.upper);
  } else if (levels.size() == 2) {
    const LevelData& prev = levels[levels.size() - 2];
    margin += 2 * std::abs(last.values[0] - prev.values[0]) +
              std::max(0.0, prev.upper - last.upper);
  }
  const double lo = std::min(std::max(0.0, value - margin), hi);

  est.value = value;
  est.epsilon = in.epsilons[chosen];
  est.level = last.level;
  est.kind = BettiEstimate::Kind::Bracket;
  est.lo = lo;
  est.hi = hi;
  est.check_invariants();
  return est;
}

} // namespace l2betti
