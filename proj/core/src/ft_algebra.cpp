#include "l2betti/ft_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "l2betti/errors.hpp"

namespace l2betti {

namespace {
constexpr double kRankFloor = 1e-8;  // singular values below this are zero

int numeric_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= kRankFloor) ++r;
  return r;
}

Eigen::MatrixXd range_basis(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= kRankFloor) ++r;
  return svd.matrixU().leftCols(r);
}
} // namespace

Rational FTAlgebra::trace_of_identity() const {
  Rational t = 0;
  for (const Block& b : blocks) t += b.weight * b.size;
  return t;
}

void FTAlgebra::validate() const {
  if (blocks.empty()) throw ValidationError("algebra needs at least one block");
  for (const Block& b : blocks)
    if (b.size < 1 || b.weight <= 0) throw ValidationError("block sizes and weights must be positive");
}

FTElement FTElement::zero(const FTAlgebra& a, int m) {
  FTElement e;
  e.algebra = &a;
  e.rank = m;
  for (const auto& b : a.blocks) e.block.push_back(Eigen::MatrixXd::Zero(m * b.size, m * b.size));
  return e;
}

FTElement FTElement::identity(const FTAlgebra& a, int m) {
  FTElement e = zero(a, m);
  for (auto& blk : e.block) blk.setIdentity();
  return e;
}

FTElement FTElement::operator-(const FTElement& other) const {
  FTElement e = *this;
  for (std::size_t i = 0; i < block.size(); ++i) e.block[i] -= other.block[i];
  return e;
}

FTElement FTElement::operator*(const FTElement& other) const {
  FTElement e = *this;
  for (std::size_t i = 0; i < block.size(); ++i) e.block[i] = block[i] * other.block[i];
  return e;
}

FTElement FTElement::transpose() const {
  FTElement e = *this;
  for (auto& blk : e.block) blk.transposeInPlace();
  return e;
}

double FTElement::psi_trace_weighted() const {
  double t = 0;
  for (std::size_t i = 0; i < block.size(); ++i)
    t += to_double(algebra->blocks[i].weight) * block[i].trace();
  return t;
}

double FTElement::frobenius() const {
  double t = 0;
  for (const auto& blk : block) t += blk.squaredNorm();
  return std::sqrt(t);
}

void FTModule::validate() const {
  const FTElement& p = projection;
  for (const auto& blk : p.block) {
    const double scale = std::max(1.0, blk.norm());
    if ((blk * blk - blk).norm() > 1e-12 * scale * scale) throw ComputationError("not-a-projection");
    if ((blk - blk.transpose()).norm() > 1e-12 * scale) throw ComputationError("not-a-projection");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk, Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double lam = es.eigenvalues()[i];
      if (std::min(std::abs(lam), std::abs(lam - 1.0)) > 1e-9)
        throw ComputationError("not-a-projection");
    }
  }
}

double dim_projective(const FTModule& m) {
  m.validate();
  return m.projection.psi_trace_weighted();
}

double dim_closed_submodule(const FTAlgebra& a, const std::vector<FTVector>& generators) {
  a.validate();
  if (generators.empty()) return 0.0;
  const int m = generators.front().rank;
  for (const FTVector& g : generators) {
    if (g.rank != m || g.block.size() != a.blocks.size()) throw ComputationError("shape-mismatch");
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
      if (g.block[i].rows() != static_cast<long>(m) * a.blocks[i].size ||
          g.block[i].cols() != a.blocks[i].size)
        throw ComputationError("shape-mismatch");
    }
  }
  // The right-invariant span per block is col(X_1 | X_2 | ...) tensored with
  // the full row side; its trace is the weighted column rank.
  double dim = 0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const int n = a.blocks[i].size;
    Eigen::MatrixXd stacked(m * n, static_cast<long>(generators.size()) * n);
    for (std::size_t g = 0; g < generators.size(); ++g)
      stacked.middleCols(static_cast<long>(g) * n, n) = generators[g].block[i];
    dim += to_double(a.blocks[i].weight) * numeric_rank(stacked);
  }
  return dim;
}

double dim_closed_submodule_oracle(const FTAlgebra& a, const std::vector<FTVector>& generators) {
  if (generators.empty()) return 0.0;
  double dim = 0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const int n = a.blocks[i].size;
    // All monomial translates xi . e_{cr}, flattened; Gram-Schmidt; the trace
    // of the C-linear projection divided by n is the psi-block trace.
    std::vector<Eigen::VectorXd> basis;
    auto add = [&](const Eigen::MatrixXd& v) {
      Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
      for (const Eigen::VectorXd& b : basis) w -= b.dot(w) * b;
      for (const Eigen::VectorXd& b : basis) w -= b.dot(w) * b;
      if (w.norm() > 1e-9) basis.push_back(w.normalized());
    };
    for (const FTVector& g : generators)
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) {
          Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(n, n);
          unit(c, r) = 1.0;
          add(g.block[i] * unit);
        }
    dim += to_double(a.blocks[i].weight) * static_cast<double>(basis.size()) / n;
  }
  return dim;
}

bool check_additivity(const FTModule& p, const FTModule& q, double tol) {
  p.validate();
  q.validate();
  for (std::size_t i = 0; i < p.projection.block.size(); ++i) {
    const Eigen::MatrixXd& bp = p.projection.block[i];
    const Eigen::MatrixXd& bq = q.projection.block[i];
    if ((bp * bq - bq).norm() > 1e-9 * std::max(1.0, bq.norm()))
      throw ComputationError("not-a-subobject");
  }
  FTModule rest{p.projection - q.projection};
  const double dp = dim_projective(p);
  const double dq = dim_projective(q);
  const double dr = dim_projective(rest);
  return std::abs(dp - dq - dr) <= tol;
}

bool check_compression(const FTModule& m, const FTElement& p, double tol) {
  m.validate();
  const FTAlgebra& a = *m.projection.algebra;
  if (p.rank != 1) throw ComputationError("shape-mismatch");
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    if (p.block[i].norm() < 1e-9) throw ComputationError("central-support-violation");

  const double dim_full = dim_projective(m);
  const int rank = m.projection.rank;

  double dim_comp = 0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const int n = a.blocks[i].size;
    const Eigen::MatrixXd V = range_basis(p.block[i]);  // n x r
    const long r = V.cols();
    // Generators of M p over the compressed corner: P (e_j ⊗ unit) p for
    // every free-module slot and every matrix unit, rows compressed by V.
    std::vector<Eigen::MatrixXd> gens;
    for (int j = 0; j < rank; ++j) {
      for (int c = 0; c < n; ++c)
        for (int rr = 0; rr < n; ++rr) {
          Eigen::MatrixXd slot = Eigen::MatrixXd::Zero(static_cast<long>(rank) * n, n);
          slot(static_cast<long>(j) * n + c, rr) = 1.0;  // e_j ⊗ e_{c,rr}
          gens.push_back(m.projection.block[i] * slot * p.block[i] * V);
        }
    }
    Eigen::MatrixXd stacked(static_cast<long>(rank) * n, static_cast<long>(gens.size()) * r);
    for (std::size_t g = 0; g < gens.size(); ++g)
      stacked.middleCols(static_cast<long>(g) * r, r) = gens[g];
    dim_comp += to_double(a.blocks[i].weight) * numeric_rank(stacked);
  }
  return std::abs(dim_full - dim_comp) <= tol;
}

double dim_image(const FTElement& t) {
  double dim = 0;
  for (std::size_t i = 0; i < t.block.size(); ++i)
    dim += to_double(t.algebra->blocks[i].weight) * numeric_rank(t.block[i]);
  return dim;
}

namespace {
FTElement chain_composite(const FTChain& chain, int from_slot, int count) {
  // phi maps slot s+1 -> slot s via maps[s mod N]; the composite of `count`
  // maps landing in slot `from_slot`.
  const int n_maps = static_cast<int>(chain.maps.size());
  FTElement acc = FTElement::identity(*chain.algebra, chain.rank);
  for (int s = from_slot; s < from_slot + count; ++s) acc = acc * chain.maps[s % n_maps];
  return acc;
}
} // namespace

bool check_limit_formulas(const FTChain& chain, double tol) {
  if (chain.maps.size() < 2) throw ComputationError("invalid-schedule");
  for (const FTElement& t : chain.maps) {
    if (t.algebra != chain.algebra || t.rank != chain.rank)
      throw ComputationError("not-equivariant");
    for (std::size_t i = 0; i < t.block.size(); ++i) {
      const long want = static_cast<long>(chain.rank) * chain.algebra->blocks[i].size;
      if (t.block[i].rows() != want || t.block[i].cols() != want)
        throw ComputationError("not-equivariant");
    }
  }

  const int period = static_cast<int>(chain.maps.size());
  int max_block = 0;
  for (const auto& b : chain.algebra->blocks) max_block = std::max(max_block, b.size);
  const int stabilization = period * (chain.rank * max_block + 2);

  // Oracle: the stabilized image of long composites (the chain's core).
  double core = dim_image(chain_composite(chain, 0, period));
  for (int t = 2; t * period <= stabilization; ++t)
    core = std::min(core, dim_image(chain_composite(chain, 0, t * period)));

  // Projective reading: sup over slots of inf over longer composites.
  double sup_inf_inverse = 0;
  for (int slot = 0; slot < period; ++slot) {
    double inf = dim_image(chain_composite(chain, slot, 1));
    for (int len = 2; len <= stabilization; ++len)
      inf = std::min(inf, dim_image(chain_composite(chain, slot, len)));
    sup_inf_inverse = std::max(sup_inf_inverse, inf);
  }

  // Inductive reading: the same combinatorics on the reversed chain.
  FTChain reversed = chain;
  std::reverse(reversed.maps.begin(), reversed.maps.end());
  double sup_inf_direct = 0;
  for (int slot = 0; slot < period; ++slot) {
    double inf = dim_image(chain_composite(reversed, slot, 1));
    for (int len = 2; len <= stabilization; ++len)
      inf = std::min(inf, dim_image(chain_composite(reversed, slot, len)));
    sup_inf_direct = std::max(sup_inf_direct, inf);
  }

  return std::abs(core - sup_inf_inverse) <= tol && std::abs(core - sup_inf_direct) <= tol;
}

bool sauer_zero_dimension(const FTModule& m) {
  const double dim = dim_projective(m);
  const bool zero_dim = dim <= 1e-12;
  const bool zero_proj = m.projection.frobenius() <= 1e-9;
  return zero_dim == zero_proj;
}

// ---------------------------------------------------------------------------
// Deterministic random instances
// ---------------------------------------------------------------------------

FTAlgebra FTRandom::algebra(int max_blocks, int max_size) {
  std::uniform_int_distribution<int> nblocks(1, max_blocks), size(1, max_size), num(1, 7),
      den(1, 7);
  FTAlgebra a;
  const int k = nblocks(rng);
  for (int i = 0; i < k; ++i) a.blocks.push_back({size(rng), Rational(num(rng), den(rng))});
  return a;
}

namespace {
Eigen::MatrixXd random_projection_matrix(std::mt19937_64& rng, long dim, long target_rank) {
  if (dim == 0) return Eigen::MatrixXd();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  for (long i = 0; i < target_rank && i < dim; ++i) d[i] = 1.0;
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}
} // namespace

FTModule FTRandom::projection(const FTAlgebra& a, int m) {
  FTElement e = FTElement::zero(a, m);
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const long dim = static_cast<long>(m) * a.blocks[i].size;
    std::uniform_int_distribution<long> rank_dist(0, dim);
    e.block[i] = random_projection_matrix(rng, dim, rank_dist(rng));
  }
  return FTModule{e};
}

FTModule FTRandom::subprojection(const FTModule& p) {
  FTElement e = FTElement::zero(*p.projection.algebra, p.projection.rank);
  for (std::size_t i = 0; i < e.block.size(); ++i) {
    const Eigen::MatrixXd V = range_basis(p.projection.block[i]);
    const long r = V.cols();
    if (r == 0) continue;
    std::uniform_int_distribution<long> rank_dist(0, r);
    const Eigen::MatrixXd inner = random_projection_matrix(rng, r, rank_dist(rng));
    e.block[i] = V * inner * V.transpose();
  }
  return FTModule{e};
}

FTElement FTRandom::central_support_projection(const FTAlgebra& a, bool drop_a_block) {
  FTElement e = FTElement::zero(a, 1);
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const int n = a.blocks[i].size;
    std::uniform_int_distribution<long> rank_dist(1, n);
    e.block[i] = random_projection_matrix(rng, n, rank_dist(rng));
  }
  if (drop_a_block) {
    std::uniform_int_distribution<std::size_t> which(0, a.blocks.size() - 1);
    e.block[which(rng)].setZero();
  }
  return e;
}

FTVector FTRandom::vector(const FTAlgebra& a, int m) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  FTVector v;
  v.algebra = &a;
  v.rank = m;
  for (const auto& b : a.blocks) {
    Eigen::MatrixXd blk(static_cast<long>(m) * b.size, b.size);
    for (long i = 0; i < blk.rows(); ++i)
      for (long j = 0; j < blk.cols(); ++j) blk(i, j) = gauss(rng);
    v.block.push_back(blk);
  }
  return v;
}

FTChain FTRandom::nested_kernel_chain(const FTAlgebra& a, int m, int length) {
  FTChain chain;
  chain.algebra = &a;
  chain.rank = m;
  FTModule current = projection(a, m);
  for (int i = 0; i < length; ++i) {
    chain.maps.push_back(current.projection);
    current = subprojection(current);
  }
  return chain;
}

} // namespace l2betti
