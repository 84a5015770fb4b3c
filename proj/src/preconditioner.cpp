#include "hps/preconditioner.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "hps/error.hpp"
#include "hps/gmres.hpp"

namespace hps {

namespace {

// out = (M ⊗ M ⊗ M) in for `batch` tensor vectors; `scratch` matches in size.
template <typename Mat>
void sweep3(const Mat& M, const cplx* in, cplx* out, cplx* scratch, index_t m, index_t batch) {
  kron::apply_axis(0, M, in, out, m, batch);
  kron::apply_axis(1, M, out, scratch, m, batch);
  kron::apply_axis(2, M, scratch, out, m, batch);
}

}  // namespace

cplx homogenization_shift(const LeafOperator& leaf) {
  const auto c = leaf.c_diag().head(leaf.map().interior_size());
  const double hi = c.real().maxCoeff();
  const double lo = c.real().minCoeff();
  return {0.5 * (hi + lo), c.imag().mean()};
}

LeafPreconditioner::LeafPreconditioner(const LeafOperator& leaf,
                                       std::shared_ptr<const EigFactor> eig,
                                       const InnerSolveConfig& cfg)
    : leaf_(&leaf), eig_(std::move(eig)), cfg_(cfg), lambda_(homogenization_shift(leaf)) {
  const index_t m = leaf.map().m();
  if (eig_->size() != m) {
    throw SolverError(ErrorCode::DimensionMismatch, "eigen-factorization does not match leaf order");
  }
  const index_t n_i = leaf.map().interior_size();
  const index_t n_b = leaf.map().boundary_size();

  diag_inv_.resize(n_i);
  double smallest = std::numeric_limits<double>::infinity();
  for (index_t k = 0; k < m; ++k) {
    for (index_t j = 0; j < m; ++j) {
      for (index_t i = 0; i < m; ++i) {
        const cplx d = -eig_->E(i) - eig_->E(j) - eig_->E(k) - lambda_;
        smallest = std::min(smallest, std::abs(d));
        diag_inv_(i + m * (j + m * k)) = 1.0 / d;
      }
    }
  }
  if (smallest < 1e-10 * std::max(1.0, std::abs(lambda_))) {
    std::ostringstream os;
    os << "homogenized interior operator is numerically singular (|min eigenvalue| = "
       << smallest << ", lambda = " << lambda_ << ")";
    throw SolverError(ErrorCode::Resonance, os.str());
  }

  real_eig_ = eig_->is_real();
  if (real_eig_) {
    V_real_ = eig_->V.real();
    Vinv_real_ = eig_->Vinv.real();
  }

  // S̃ = F_bb - F_bi Ã⁻¹ A_ib, with Ã⁻¹ applied to all columns of A_ib at once.
  ComplexMatrix columns = ComplexMatrix(leaf.A_ib());
  ComplexMatrix solved(n_i, n_b);
  ComplexMatrix scratch(n_i, n_b);
  if (real_eig_) {
    sweep3(Vinv_real_, columns.data(), solved.data(), scratch.data(), m, n_b);
  } else {
    sweep3(eig_->Vinv, columns.data(), solved.data(), scratch.data(), m, n_b);
  }
  solved.array().colwise() *= diag_inv_.array();
  if (real_eig_) {
    sweep3(V_real_, solved.data(), columns.data(), scratch.data(), m, n_b);
  } else {
    sweep3(eig_->V, solved.data(), columns.data(), scratch.data(), m, n_b);
  }
  scratch.resize(0, 0);
  solved.resize(0, 0);

  ComplexMatrix s_tilde = ComplexMatrix(leaf.F_bb());
  s_tilde.noalias() -= leaf.F_bi() * columns;
  columns.resize(0, 0);

  const double scale = s_tilde.cwiseAbs().maxCoeff();
  s_tilde_lu_.compute(s_tilde);
  const double pivot = s_tilde_lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(pivot >= 1e-14 * scale)) {
    std::ostringstream os;
    os << "homogenized Schur complement is singular (pivot " << pivot << ", scale " << scale << ")";
    throw SolverError(ErrorCode::SingularSchur, os.str());
  }
  if (cfg_.keep_s_tilde) s_tilde_ = std::move(s_tilde);
}

void LeafPreconditioner::apply_homogenized_inverse(const cplx* v, cplx* w) const {
  const index_t m = leaf_->map().m();
  const index_t n_i = leaf_->map().interior_size();
  ComplexVector a(n_i);
  ComplexVector b(n_i);
  if (real_eig_) {
    kron::apply_axis(0, Vinv_real_, v, a.data(), m);
    kron::apply_axis(1, Vinv_real_, a.data(), b.data(), m);
    kron::apply_axis(2, Vinv_real_, b.data(), a.data(), m);
  } else {
    kron::apply_axis(0, eig_->Vinv, v, a.data(), m);
    kron::apply_axis(1, eig_->Vinv, a.data(), b.data(), m);
    kron::apply_axis(2, eig_->Vinv, b.data(), a.data(), m);
  }
  a.array() *= diag_inv_.array();
  if (real_eig_) {
    kron::apply_axis(0, V_real_, a.data(), b.data(), m);
    kron::apply_axis(1, V_real_, b.data(), a.data(), m);
    kron::apply_axis(2, V_real_, a.data(), w, m);
  } else {
    kron::apply_axis(0, eig_->V, a.data(), b.data(), m);
    kron::apply_axis(1, eig_->V, b.data(), a.data(), m);
    kron::apply_axis(2, eig_->V, a.data(), w, m);
  }
}

ComplexVector LeafPreconditioner::apply_homogenized_inverse(const ComplexVector& v) const {
  require_size(v.size(), leaf_->map().interior_size(), "apply_homogenized_inverse");
  ComplexVector w(v.size());
  apply_homogenized_inverse(v.data(), w.data());
  return w;
}

ComplexVector LeafPreconditioner::apply_homogenized(const ComplexVector& v) const {
  require_size(v.size(), leaf_->map().interior_size(), "apply_homogenized");
  const index_t m = leaf_->map().m();
  ComplexVector w = -lambda_ * v;
  for (int axis = 0; axis < 3; ++axis) {
    kron::apply_axis(axis, leaf_->basis().L1, v.data(), w.data(), m, 1, Accumulate::Subtract);
  }
  return w;
}

InnerSolve LeafPreconditioner::solve_interior(const ComplexVector& rhs) const {
  const index_t n_i = leaf_->map().interior_size();
  require_size(rhs.size(), n_i, "solve_interior");
  KrylovConfig kc;
  kc.restart = cfg_.interior_maxit;
  kc.max_iterations = cfg_.interior_maxit;
  kc.rel_reduction = cfg_.interior_tol;
  kc.record_history = false;
  kc.verify_final = false;
  const LinearMap A = [this, n_i](const ComplexVector& in, ComplexVector& out) {
    out.resize(n_i);
    leaf_->apply_interior(in.data(), out.data());
  };
  const LinearMap P = [this, n_i](const ComplexVector& in, ComplexVector& out) {
    out.resize(n_i);
    apply_homogenized_inverse(in.data(), out.data());
  };
  GmresResult res = gmres_solve(A, P, rhs, ComplexVector::Zero(n_i), kc);
  if (!res.report.converged) {
    throw SolverError(ErrorCode::NoConvergence, "interior solve did not converge", std::nullopt,
                      res.report.estimated_reduction);
  }
  return {std::move(res.x), res.report.iterations, 0, res.report.estimated_reduction};
}

int LeafPreconditioner::apply_schur(const ComplexVector& v, ComplexVector& w) const {
  const index_t n_b = leaf_->map().boundary_size();
  require_size(v.size(), n_b, "apply_schur");
  const ComplexVector coupled = leaf_->A_ib() * v;
  InnerSolve inner = solve_interior(coupled);
  w.resize(n_b);
  w.noalias() = leaf_->flux_bb() * v;
  w += (kI * leaf_->eta()) * v;
  w.noalias() -= leaf_->F_bi() * inner.x;
  return inner.iterations;
}

ComplexVector LeafPreconditioner::apply_s_tilde_inverse(const ComplexVector& v) const {
  require_size(v.size(), leaf_->map().boundary_size(), "apply_s_tilde_inverse");
  return s_tilde_lu_.solve(v);
}

InnerSolve LeafPreconditioner::solve_schur(const ComplexVector& rhs_b) const {
  const index_t n_b = leaf_->map().boundary_size();
  require_size(rhs_b.size(), n_b, "solve_schur");
  KrylovConfig kc;
  kc.restart = cfg_.schur_maxit;
  kc.max_iterations = cfg_.schur_maxit;
  kc.rel_reduction = cfg_.schur_tol;
  kc.record_history = false;
  kc.verify_final = false;
  long nested = 0;
  const LinearMap S = [this, &nested](const ComplexVector& in, ComplexVector& out) {
    nested += apply_schur(in, out);
  };
  const LinearMap P = [this](const ComplexVector& in, ComplexVector& out) {
    out = s_tilde_lu_.solve(in);
  };
  GmresResult res = gmres_solve(S, P, rhs_b, ComplexVector::Zero(n_b), kc);
  if (!res.report.converged) {
    throw SolverError(ErrorCode::NoConvergence, "Schur complement solve did not converge",
                      std::nullopt, res.report.estimated_reduction);
  }
  return {std::move(res.x), res.report.iterations, nested, res.report.estimated_reduction};
}

LeafPreconditioner homogenize(const LeafOperator& leaf, std::shared_ptr<const EigFactor> eig,
                              const InnerSolveConfig& cfg) {
  return LeafPreconditioner(leaf, std::move(eig), cfg);
}

}  // namespace hps
