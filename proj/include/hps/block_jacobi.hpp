#pragma once

#include <memory>
#include <vector>

#include "hps/mesh.hpp"
#include "hps/preconditioner.hpp"

namespace hps {

/// Inner-iteration tally for one leaf during one preconditioner application.
struct LeafSolveStats {
  int interior_iterations = 0;  // both A_ii solves
  int schur_iterations = 0;     // outer Schur GMRES iterations
  long nested_iterations = 0;   // A_ii iterations inside Schur applications

  /// Two interior solves plus one Schur solve.
  long total() const { return interior_iterations + schur_iterations; }
};

struct ApplicationStats {
  long interior_iterations = 0;
  long schur_iterations = 0;
  long nested_iterations = 0;
};

/// Exact leaf-block inverse of A, each block applied through nested
/// homogenization-preconditioned solves.
class BlockJacobi {
 public:
  /// Builds one LeafPreconditioner per leaf (leaf-parallel). Keeps a reference to A.
  BlockJacobi(const GlobalOperator& A, const InnerSolveConfig& cfg = {});

  const GlobalOperator& op() const { return *A_; }
  const LeafPreconditioner& leaf_preconditioner(long leaf) const {
    return *pcs_[static_cast<std::size_t>(leaf)];
  }
  const std::shared_ptr<const EigFactor>& eig() const { return eig_; }
  double setup_seconds() const { return setup_seconds_; }

  /// w = J⁻¹ v. Not reentrant: statistics are updated per call.
  void apply(const ComplexVector& v, ComplexVector& w);
  ComplexVector apply(const ComplexVector& v);

  /// Per-leaf tallies of the most recent application.
  const std::vector<LeafSolveStats>& last_application() const { return last_; }
  /// Totals over leaves, one entry per application so far.
  const std::vector<ApplicationStats>& history() const { return history_; }
  void clear_history() { history_.clear(); }

 private:
  const GlobalOperator* A_;
  std::shared_ptr<const EigFactor> eig_;
  std::vector<std::unique_ptr<LeafPreconditioner>> pcs_;
  std::vector<LeafSolveStats> last_;
  std::vector<ApplicationStats> history_;
  double setup_seconds_ = 0.0;
};

/// Solves A^τ [u_i; u_b] = [s; f] for one leaf by block elimination:
/// f_i = A_ii⁻¹ s, u_b = S⁻¹(f - F_bi f_i), u_i = f_i - A_ii⁻¹ A_ib u_b.
ComplexVector solve_leaf_block(const LeafPreconditioner& pc, const ComplexVector& rhs,
                               LeafSolveStats* stats = nullptr);

}  // namespace hps
