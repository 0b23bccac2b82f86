#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "l2betti/rational.hpp"

namespace l2betti {

/// A finite direct sum of matrix blocks with trace weights:
/// A = ⊕_i M_{n_i}, psi(x) = sum_i w_i Tr(x_i). The sandbox model for a
/// tracial algebra; semi-finiteness is exercised by varying the weights and
/// by compression.
struct FTAlgebra {
  struct Block {
    int size = 1;
    Rational weight = 1;
  };
  std::vector<Block> blocks;

  Rational trace_of_identity() const;  // sum w_i n_i
  void validate() const;               // sizes, weights positive
};

/// Element of M_m(A): one (m n_i) x (m n_i) real matrix per block, acting on
/// the column side of the trace representation (L^2 psi)^m.
struct FTElement {
  const FTAlgebra* algebra = nullptr;
  int rank = 1;  // m
  std::vector<Eigen::MatrixXd> block;

  static FTElement zero(const FTAlgebra& a, int m);
  static FTElement identity(const FTAlgebra& a, int m);
  FTElement operator-(const FTElement& other) const;
  FTElement operator*(const FTElement& other) const;
  FTElement transpose() const;
  double psi_trace_weighted() const;  // sum_i w_i Tr(block_i)
  double frobenius() const;
};

/// A psi-finitely-generated projective module p A^m, given by its projection.
struct FTModule {
  FTElement projection;

  /// projection^2 = projection = projection^T within 1e-12; spectrum in {0,1}
  /// within 1e-9. Throws ComputationError("not-a-projection") otherwise.
  void validate() const;
};

/// (Tr_m ⊗ psi)(projection). Independent of the representing projection.
double dim_projective(const FTModule& m);

/// A vector in (L^2 psi)^m: per block an (m n_i) x n_i matrix (m stacked
/// block-algebra elements).
struct FTVector {
  const FTAlgebra* algebra = nullptr;
  int rank = 1;
  std::vector<Eigen::MatrixXd> block;
};

/// Trace of the projection onto the closed right-invariant span of the
/// generators. Equals dim_projective of the range projection.
/// Throws ComputationError("shape-mismatch") on inconsistent vector shapes.
double dim_closed_submodule(const FTAlgebra& a, const std::vector<FTVector>& generators);

/// Independent oracle: dense Gram-Schmidt over the C-linear span of all
/// monomial translates of the generators, trace computed against a raw
/// orthonormal basis of the representation. Kept free of the column-space
/// shortcut used by dim_closed_submodule.
double dim_closed_submodule_oracle(const FTAlgebra& a, const std::vector<FTVector>& generators);

/// |dim p - dim q - dim(p - q)| <= tol for a subprojection q <= p.
/// Throws ComputationError("not-a-subobject") when q is not under p.
bool check_additivity(const FTModule& p, const FTModule& q, double tol = 1e-9);

/// dim_{(A,psi)} M == dim_{(A_p, psi_p)} M p for a projection p in A with
/// full central support (a nonzero component in every block).
/// Throws ComputationError("central-support-violation") otherwise.
bool check_compression(const FTModule& m, const FTElement& p, double tol = 1e-9);

/// A cyclically composable chain of module endomorphism data over A^m:
/// maps[i] sends chain slot i+1 to slot i (indices mod length). The chain is
/// read as an infinite periodic inverse (or direct) system.
struct FTChain {
  const FTAlgebra* algebra = nullptr;
  int rank = 1;
  std::vector<FTElement> maps;
};

/// Both limit formulas on the periodic extension of the chain. The directly
/// computed limit dimension is the stabilized-image dimension of the full
/// cycle composite; it must match sup_i inf_{j >= i} dim im(phi_{ij}) within
/// tol, for the inverse and the direct reading alike.
/// Throws ComputationError("not-equivariant") when a map is not a module map.
bool check_limit_formulas(const FTChain& chain, double tol = 1e-9);

/// dim im of a left-multiplication map on A^m (trace of the range projection).
double dim_image(const FTElement& t);

/// Sauer-style zero test at finite scale: dim == 0 iff the projection is 0.
bool sauer_zero_dimension(const FTModule& m);

/// Deterministic random instances for the axiom battery.
struct FTRandom {
  std::mt19937_64 rng;
  explicit FTRandom(std::uint64_t seed) : rng(seed) {}

  FTAlgebra algebra(int max_blocks = 3, int max_size = 5);
  FTModule projection(const FTAlgebra& a, int m);
  FTModule subprojection(const FTModule& p);
  FTElement central_support_projection(const FTAlgebra& a, bool drop_a_block = false);
  FTVector vector(const FTAlgebra& a, int m);
  FTChain nested_kernel_chain(const FTAlgebra& a, int m, int length);
};

} // namespace l2betti
