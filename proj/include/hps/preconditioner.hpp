#pragma once

#include <memory>

#include "hps/leaf.hpp"
#include "hps/spectral.hpp"

namespace hps {

struct InnerSolveConfig {
  double interior_tol = 1e-10;
  double schur_tol = 1e-10;
  int interior_maxit = 200;
  int schur_maxit = 200;
  /// Keep the unfactorized homogenized Schur complement (tests and diagnostics).
  bool keep_s_tilde = false;
};

struct InnerSolve {
  ComplexVector x;
  int iterations = 0;
  /// Interior GMRES iterations spent inside Schur-complement applications.
  long nested_iterations = 0;
  double reduction = 0.0;
};

/// Per-leaf homogenized preconditioner.
///
/// The interior block A_ii is preconditioned by Ã_ii, which replaces the variable
/// diagonal C_ii by the scalar λ = (max + min)/2 and is inverted by fast
/// diagonalization with the eigenvectors of L1. The leaf Schur complement
/// S = F_bb - F_bi A_ii⁻¹ A_ib is preconditioned by the dense, LU-factorized
/// S̃ = F_bb - F_bi Ã_ii⁻¹ A_ib.
///
/// Holds a reference to its leaf, which must outlive it.
class LeafPreconditioner {
 public:
  LeafPreconditioner(const LeafOperator& leaf, std::shared_ptr<const EigFactor> eig,
                     const InnerSolveConfig& cfg = {});

  const LeafOperator& leaf() const { return *leaf_; }
  const InnerSolveConfig& config() const { return cfg_; }
  cplx lambda() const { return lambda_; }
  const ComplexVector& diag_inv() const { return diag_inv_; }
  /// Empty unless InnerSolveConfig::keep_s_tilde was set.
  const ComplexMatrix& s_tilde() const { return s_tilde_; }

  /// w = Ã_ii⁻¹ v (three V⁻¹ sweeps, diagonal scaling, three V sweeps).
  void apply_homogenized_inverse(const cplx* v, cplx* w) const;
  ComplexVector apply_homogenized_inverse(const ComplexVector& v) const;

  /// w = Ã_ii v, i.e. A_ii with C_ii replaced by λI.
  ComplexVector apply_homogenized(const ComplexVector& v) const;

  /// Left-preconditioned GMRES for A_ii w = rhs. Throws NoConvergence.
  InnerSolve solve_interior(const ComplexVector& rhs) const;

  /// w = S v with the inner A_ii solve done by solve_interior. Returns the
  /// interior iterations spent.
  int apply_schur(const ComplexVector& v, ComplexVector& w) const;

  /// w = S̃⁻¹ v from the stored LU factors.
  ComplexVector apply_s_tilde_inverse(const ComplexVector& v) const;

  /// GMRES for S w = rhs_b left-preconditioned by S̃⁻¹. Throws NoConvergence.
  InnerSolve solve_schur(const ComplexVector& rhs_b) const;

 private:
  const LeafOperator* leaf_;
  std::shared_ptr<const EigFactor> eig_;
  InnerSolveConfig cfg_;
  cplx lambda_;
  ComplexVector diag_inv_;
  bool real_eig_ = false;
  RealMatrix V_real_;
  RealMatrix Vinv_real_;
  ComplexMatrix s_tilde_;
  Eigen::PartialPivLU<ComplexMatrix> s_tilde_lu_;
};

/// λ = (max + min)/2 over the interior diagonal of C. For complex entries the
/// max/min act on real parts and the imaginary parts are averaged.
cplx homogenization_shift(const LeafOperator& leaf);

LeafPreconditioner homogenize(const LeafOperator& leaf, std::shared_ptr<const EigFactor> eig,
                              const InnerSolveConfig& cfg = {});

}  // namespace hps
