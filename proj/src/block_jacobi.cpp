#include "hps/block_jacobi.hpp"

#include <chrono>

#include "hps/error.hpp"
#include "hps/parallel.hpp"

namespace hps {

ComplexVector solve_leaf_block(const LeafPreconditioner& pc, const ComplexVector& rhs,
                               LeafSolveStats* stats) {
  const LeafOperator& leaf = pc.leaf();
  const index_t n_i = leaf.map().interior_size();
  const index_t n_b = leaf.map().boundary_size();
  require_size(rhs.size(), n_i + n_b, "solve_leaf_block");

  InnerSolve f = pc.solve_interior(rhs.head(n_i));
  ComplexVector h = rhs.tail(n_b);
  h.noalias() -= leaf.F_bi() * f.x;
  InnerSolve g = pc.solve_schur(h);
  InnerSolve corr = pc.solve_interior(leaf.A_ib() * g.x);

  ComplexVector w(n_i + n_b);
  w.head(n_i) = f.x - corr.x;
  w.tail(n_b) = g.x;
  if (stats != nullptr) {
    stats->interior_iterations = f.iterations + corr.iterations;
    stats->schur_iterations = g.iterations;
    stats->nested_iterations = g.nested_iterations;
  }
  return w;
}

BlockJacobi::BlockJacobi(const GlobalOperator& A, const InnerSolveConfig& cfg) : A_(&A) {
  const auto start = std::chrono::steady_clock::now();
  eig_ = std::make_shared<const EigFactor>(eig_factor(A.basis()));
  const long count = A.mesh().leaf_count();
  pcs_.resize(static_cast<std::size_t>(count));
  parallel_for(count, [&](long id) {
    try {
      pcs_[static_cast<std::size_t>(id)] =
          std::make_unique<LeafPreconditioner>(A.leaf(id), eig_, cfg);
    } catch (const SolverError& e) {
      throw e.with_leaf(id);
    }
  });
  last_.assign(static_cast<std::size_t>(count), {});
  setup_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void BlockJacobi::apply(const ComplexVector& v, ComplexVector& w) {
  require_size(v.size(), A_->size(), "apply_block_jacobi");
  w.resize(A_->size());
  const index_t n = A_->leaf_size();
  parallel_for(A_->mesh().leaf_count(), [&](long id) {
    try {
      LeafSolveStats& st = last_[static_cast<std::size_t>(id)];
      w.segment(id * n, n) =
          solve_leaf_block(*pcs_[static_cast<std::size_t>(id)], v.segment(id * n, n), &st);
    } catch (const SolverError& e) {
      throw e.with_leaf(id);
    }
  });
  ApplicationStats total;
  for (const LeafSolveStats& st : last_) {
    total.interior_iterations += st.interior_iterations;
    total.schur_iterations += st.schur_iterations;
    total.nested_iterations += st.nested_iterations;
  }
  history_.push_back(total);
}

ComplexVector BlockJacobi::apply(const ComplexVector& v) {
  ComplexVector w;
  apply(v, w);
  return w;
}

}  // namespace hps
