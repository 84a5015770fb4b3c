#include <gtest/gtest.h>

#include <random>

#include "hps/error.hpp"
#include "hps/gmres.hpp"
#include "oracles.hpp"

using namespace hps;

namespace {

LinearMap dense_map(const ComplexMatrix& M) {
  return [M](const ComplexVector& in, ComplexVector& out) { out = M * in; };
}

const LinearMap kIdentity = [](const ComplexVector& in, ComplexVector& out) { out = in; };

ComplexMatrix diagonally_dominant(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  ComplexMatrix A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = cplx{d(rng), d(rng)} / double(n);
    A(i, i) += cplx{2.0 + std::abs(d(rng)), d(rng)};
  }
  return A;
}

ComplexMatrix nonnormal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  ComplexMatrix A = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = cplx{1.0 + 0.05 * i, 0.3 * std::sin(i)};
    for (int j = i + 1; j < std::min(n, i + 4); ++j) A(i, j) = cplx{d(rng), d(rng)} * 0.4;
  }
  return A;
}

}  // namespace

TEST(Gmres, IdentityConvergesInOneStep) {
  std::mt19937_64 rng(61);
  const ComplexVector b = oracle::random_vector(20, rng);
  const GmresResult r = gmres_solve(kIdentity, kIdentity, b, ComplexVector::Zero(20), {});
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
  EXPECT_LT((r.x - b).norm() / b.norm(), 1e-14);
}

TEST(Gmres, ZeroRightHandSide) {
  const GmresResult r =
      gmres_solve(kIdentity, kIdentity, ComplexVector::Zero(7), ComplexVector::Zero(7), {});
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 0);
  EXPECT_EQ(r.x.norm(), 0.0);
}

TEST(Gmres, DiagonallyPreconditionedMatchesDirectSolve) {
  std::mt19937_64 rng(62);
  const ComplexMatrix A = diagonally_dominant(50, rng);
  const ComplexMatrix P = A.diagonal().cwiseInverse().asDiagonal();
  const ComplexVector b = oracle::random_vector(50, rng);
  KrylovConfig cfg;
  cfg.rel_reduction = 1e-12;
  const GmresResult r = gmres_solve(dense_map(A), dense_map(P), b, ComplexVector::Zero(50), cfg);
  ASSERT_TRUE(r.report.converged);
  const ComplexVector ref = A.partialPivLu().solve(b);
  EXPECT_LT((r.x - ref).norm() / ref.norm(), 1e-10);
  EXPECT_LE(r.report.true_reduction, 1e-12 * 1.01);
}

TEST(Gmres, ExactPreconditionerTakesOneIteration) {
  std::mt19937_64 rng(63);
  const ComplexMatrix A = nonnormal(12, rng);
  const ComplexMatrix Ainv = A.inverse();
  const ComplexVector b = oracle::random_vector(12, rng);
  KrylovConfig cfg;
  cfg.rel_reduction = 1e-10;
  const GmresResult r = gmres_solve(dense_map(A), dense_map(Ainv), b, ComplexVector::Zero(12), cfg);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
}

TEST(Gmres, HistoryMonotoneWithinRestartCycles) {
  std::mt19937_64 rng(64);
  const ComplexMatrix A = nonnormal(80, rng);
  const ComplexVector b = oracle::random_vector(80, rng);
  KrylovConfig cfg;
  cfg.restart = 7;
  cfg.rel_reduction = 1e-10;
  const GmresResult r = gmres_solve(dense_map(A), kIdentity, b, ComplexVector::Zero(80), cfg);
  ASSERT_TRUE(r.report.converged);
  EXPECT_GT(r.report.restarts, 0);
  const auto& h = r.report.history;
  ASSERT_EQ(h.size(), static_cast<std::size_t>(r.report.iterations) + 1);
  EXPECT_EQ(h.front(), 1.0);
  auto starts = r.report.cycle_starts;
  starts.push_back(static_cast<int>(h.size()) - 1);
  for (std::size_t c = 0; c + 1 < starts.size(); ++c) {
    for (int k = starts[c] + 1; k <= starts[c + 1]; ++k) EXPECT_LE(h[k], h[k - 1] * (1 + 1e-12));
  }
}

TEST(Gmres, EstimateAgreesWithRecomputedResidual) {
  std::mt19937_64 rng(65);
  const ComplexMatrix A = nonnormal(60, rng);
  const ComplexMatrix P = A.diagonal().cwiseInverse().asDiagonal();
  const ComplexVector b = oracle::random_vector(60, rng);
  KrylovConfig cfg;
  cfg.rel_reduction = 1e-5;
  const GmresResult r = gmres_solve(dense_map(A), dense_map(P), b, ComplexVector::Zero(60), cfg);
  ASSERT_TRUE(r.report.converged);
  EXPECT_LT(std::abs(r.report.true_reduction - r.report.estimated_reduction),
            1e-6 * r.report.estimated_reduction);
  EXPECT_LE(r.report.estimated_reduction, 1e-5);
}

TEST(Gmres, FlexibleAgreesWithStandardForFixedPreconditioner) {
  std::mt19937_64 rng(66);
  const ComplexMatrix A = diagonally_dominant(40, rng);
  const ComplexMatrix P = A.diagonal().cwiseInverse().asDiagonal();
  const ComplexVector b = oracle::random_vector(40, rng);
  KrylovConfig cfg;
  cfg.rel_reduction = 1e-12;
  const GmresResult s = gmres_solve(dense_map(A), dense_map(P), b, ComplexVector::Zero(40), cfg);
  cfg.flexible = true;
  const GmresResult f = gmres_solve(dense_map(A), dense_map(P), b, ComplexVector::Zero(40), cfg);
  ASSERT_TRUE(s.report.converged);
  ASSERT_TRUE(f.report.converged);
  EXPECT_LT((s.x - f.x).norm() / s.x.norm(), 1e-8);
  EXPECT_LE(f.report.unpreconditioned_reduction, 1e-12 * 1.01);
}

TEST(Gmres, NonzeroInitialGuess) {
  std::mt19937_64 rng(67);
  const ComplexMatrix A = diagonally_dominant(30, rng);
  const ComplexVector b = oracle::random_vector(30, rng);
  const ComplexVector ref = A.partialPivLu().solve(b);
  KrylovConfig cfg;
  cfg.rel_reduction = 1e-12;
  const GmresResult r = gmres_solve(dense_map(A), kIdentity, b, ref + 1e-3 * b, cfg);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LT((r.x - ref).norm() / ref.norm(), 1e-12);
}

TEST(Gmres, IterationCapReportsMaxIterations) {
  std::mt19937_64 rng(68);
  const ComplexMatrix A = nonnormal(60, rng);
  const ComplexVector b = oracle::random_vector(60, rng);
  KrylovConfig cfg;
  cfg.max_iterations = 3;
  cfg.rel_reduction = 1e-12;
  const GmresResult r = gmres_solve(dense_map(A), kIdentity, b, ComplexVector::Zero(60), cfg);
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.status, KrylovStatus::MaxIterations);
  EXPECT_EQ(r.report.iterations, 3);
  EXPECT_GT(r.report.estimated_reduction, 1e-12);
  EXPECT_LT(r.report.estimated_reduction, 1.0);
}

TEST(Gmres, ThreadedReductionsAgree) {
  std::mt19937_64 rng(69);
  const ComplexMatrix A = diagonally_dominant(50, rng);
  const ComplexVector b = oracle::random_vector(50, rng);
  KrylovConfig cfg;
  cfg.rel_reduction = 1e-12;
  const GmresResult d = gmres_solve(dense_map(A), kIdentity, b, ComplexVector::Zero(50), cfg);
  cfg.deterministic = false;
  const GmresResult t = gmres_solve(dense_map(A), kIdentity, b, ComplexVector::Zero(50), cfg);
  EXPECT_LT((d.x - t.x).norm() / d.x.norm(), 1e-10);
}

TEST(Gmres, ConfigValidation) {
  KrylovConfig cfg;
  cfg.restart = 0;
  EXPECT_THROW(cfg.validate(), SolverError);
  cfg = {};
  cfg.rel_reduction = 1.0;
  EXPECT_THROW(cfg.validate(), SolverError);
  cfg.rel_reduction = 0.0;
  EXPECT_THROW(cfg.validate(), SolverError);
  EXPECT_THROW(gmres_solve(kIdentity, kIdentity, ComplexVector::Zero(3), ComplexVector::Zero(4), {}),
               SolverError);
}

TEST(Rprr, ToleranceFromDigits) {
  EXPECT_DOUBLE_EQ(rprr_tolerance(6), 1e-8);
  EXPECT_DOUBLE_EQ(rprr_tolerance(11), 1e-13);
  EXPECT_DOUBLE_EQ(rprr_tolerance(1), 1e-3);
  EXPECT_THROW(rprr_tolerance(0), SolverError);
}
