#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "hps/error.hpp"
#include "hps/spectral.hpp"
#include "oracles.hpp"

using namespace hps;

namespace {

ComplexMatrix random_matrix(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  ComplexMatrix M(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) M(i, j) = cplx{d(rng), d(rng)};
  }
  return M;
}

ComplexMatrix dense_kron(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

double rel(const ComplexVector& a, const ComplexVector& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Chebyshev, ThreeNodes) {
  const RealVector x = chebyshev_nodes(3, 1.0);
  EXPECT_DOUBLE_EQ(x(0), 0.0);
  EXPECT_NEAR(x(1), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(x(2), 1.0);
}

TEST(Chebyshev, NodesIncreasingAndSymmetric) {
  for (int n : {4, 7, 16, 21}) {
    const double h = 0.37;
    const RealVector x = chebyshev_nodes(n, h);
    EXPECT_EQ(x(0), 0.0);
    EXPECT_EQ(x(n - 1), h);
    for (int j = 1; j < n; ++j) EXPECT_GT(x(j), x(j - 1));
    for (int j = 0; j < n; ++j) EXPECT_NEAR(x(j) + x(n - 1 - j), h, 1e-15);
    EXPECT_LT((x - oracle::nodes(n, h)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Chebyshev, DerivativeOfCubic) {
  const RealVector x = chebyshev_nodes(5, 1.0);
  const RealMatrix D = chebyshev_derivative(5, 1.0);
  const RealVector p = x.array().cube();
  const RealVector dp = 3.0 * x.array().square();
  EXPECT_LT((D * p - dp).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Chebyshev, DerivativeExactOnPolynomials) {
  for (int n = 4; n <= 20; ++n) {
    const double h = 0.5;
    const RealVector x = chebyshev_nodes(n, h);
    const RealMatrix D = chebyshev_derivative(n, h);
    for (int deg = 0; deg < n; ++deg) {
      const RealVector p = x.array().pow(deg);
      const RealVector dp = deg == 0 ? RealVector::Zero(n).eval()
                                     : RealVector(deg * x.array().pow(deg - 1));
      const double scale = std::max(1.0, dp.cwiseAbs().maxCoeff());
      EXPECT_LT((D * p - dp).cwiseAbs().maxCoeff() / scale, 1e-10) << "n=" << n << " deg=" << deg;
    }
  }
}

TEST(Chebyshev, DerivativeMatchesBarycentricOracle) {
  for (int n : {4, 9, 16}) {
    const RealMatrix D = chebyshev_derivative(n, 0.25);
    const RealMatrix O = oracle::barycentric_derivative(oracle::nodes(n, 0.25));
    EXPECT_LT((D - O).cwiseAbs().maxCoeff() / O.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SpectralBasis, RejectsBadSizes) {
  try {
    build_basis(3, 1.0);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Sizing);
  }
  EXPECT_THROW(build_basis(8, 0.0), SolverError);
  EXPECT_THROW(build_basis(8, -1.0), SolverError);
}

TEST(SpectralBasis, SecondDerivativeBlocks) {
  const SpectralBasis B = build_basis(16, 0.5);
  ASSERT_EQ(B.L1.rows(), 14);
  ASSERT_EQ(B.L1.cols(), 14);
  const RealMatrix D2 = B.D1 * B.D1;
  EXPECT_LT((B.L1 - D2.block(1, 1, 14, 14)).cwiseAbs().maxCoeff(), 1e-12 * D2.cwiseAbs().maxCoeff());
  EXPECT_LT((B.B1.col(0) - D2.block(1, 0, 14, 1)).cwiseAbs().maxCoeff(),
            1e-12 * D2.cwiseAbs().maxCoeff());
  EXPECT_LT((B.B1.col(1) - D2.block(1, 15, 14, 1)).cwiseAbs().maxCoeff(),
            1e-12 * D2.cwiseAbs().maxCoeff());
}

TEST(SpectralBasis, ScalesWithSquaredInverseEdge) {
  const SpectralBasis a = build_basis(10, 1.0);
  const SpectralBasis b = build_basis(10, 0.25);
  EXPECT_LT((b.L1 - 16.0 * a.L1).cwiseAbs().maxCoeff(), 1e-10 * b.L1.cwiseAbs().maxCoeff());
}

TEST(EigFactor, TwoByTwoClosedForm) {
  const SpectralBasis B = build_basis(4, 1.0);
  const EigFactor F = eig_factor(B);
  const double tr = B.L1.trace();
  const double det = B.L1.determinant();
  const std::complex<double> disc = std::sqrt(cplx{tr * tr - 4.0 * det, 0.0});
  cplx r1 = 0.5 * (tr - disc);
  cplx r2 = 0.5 * (tr + disc);
  if (r2.real() < r1.real()) std::swap(r1, r2);
  EXPECT_LT(std::abs(F.E(0) - r1), 1e-12 * std::abs(r1));
  EXPECT_LT(std::abs(F.E(1) - r2), 1e-12 * std::abs(r2));
}

TEST(EigFactor, ReconstructionAndInverse) {
  for (int n : {6, 8, 12, 16, 20}) {
    const SpectralBasis B = build_basis(n, 0.5);
    const EigFactor F = eig_factor(B);
    const ComplexMatrix L1 = B.L1.cast<cplx>();
    const double scale = L1.cwiseAbs().maxCoeff();
    EXPECT_LT((L1 * F.V - F.V * F.E.asDiagonal()).cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LT((F.V * F.E.asDiagonal() * F.Vinv - L1).cwiseAbs().maxCoeff(), 1e-10 * scale);
    const ComplexMatrix I = ComplexMatrix::Identity(n - 2, n - 2);
    EXPECT_LT((F.V * F.Vinv - I).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(EigFactor, NegativeRealSpectrumSorted) {
  for (int n : {8, 12, 16}) {
    const EigFactor F = eig_factor(build_basis(n, 1.0));
    EXPECT_TRUE(F.is_real(1e-12));
    for (int k = 0; k < F.size(); ++k) EXPECT_LT(F.E(k).real(), 0.0);
    for (int k = 1; k < F.size(); ++k) EXPECT_LE(F.E(k - 1).real(), F.E(k).real());
  }
}

TEST(EigFactor, MatchesIndependentEigensolver) {
  const SpectralBasis B = build_basis(12, 1.0);
  const EigFactor F = eig_factor(B);
  const RealMatrix D = oracle::barycentric_derivative(oracle::nodes(12, 1.0));
  const RealMatrix L1 = (D * D).block(1, 1, 10, 10);
  Eigen::EigenSolver<RealMatrix> es(L1);
  std::vector<double> ref;
  for (int k = 0; k < 10; ++k) ref.push_back(es.eigenvalues()(k).real());
  std::sort(ref.begin(), ref.end());
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(F.E(k).real(), ref[k], 1e-9 * std::abs(ref[k]));
}

TEST(Kron3, IdentityLeavesInputUnchanged) {
  std::mt19937_64 rng(1);
  const ComplexVector x = oracle::random_vector(64, rng);
  const ComplexMatrix I = ComplexMatrix::Identity(4, 4);
  EXPECT_EQ(kron3_apply(nullptr, nullptr, nullptr, x), x);
  EXPECT_LT(rel(kron3_apply(&I, &I, &I, x), x), 1e-16);
}

TEST(Kron3, MatchesDenseKronecker) {
  std::mt19937_64 rng(2);
  for (int m : {2, 3, 5}) {
    const ComplexMatrix Mz = random_matrix(m, rng);
    const ComplexMatrix My = random_matrix(m, rng);
    const ComplexMatrix Mx = random_matrix(m, rng);
    const ComplexVector x = oracle::random_vector(m * m * m, rng);
    const ComplexVector ref = dense_kron(Mz, dense_kron(My, Mx)) * x;
    EXPECT_LT(rel(kron3_apply(&Mz, &My, &Mx, x), ref), 1e-13);
    const ComplexMatrix I = ComplexMatrix::Identity(m, m);
    EXPECT_LT(rel(kron3_apply(nullptr, &My, nullptr, x), dense_kron(I, dense_kron(My, I)) * x), 1e-13);
    EXPECT_LT(rel(kron3_apply(&Mz, nullptr, nullptr, x), dense_kron(Mz, dense_kron(I, I)) * x), 1e-13);
  }
}

TEST(Kron3, RightmostFactorActsOnContiguousSlices) {
  std::mt19937_64 rng(3);
  const ComplexMatrix Mx = random_matrix(4, rng);
  const ComplexVector x = oracle::random_vector(64, rng);
  const ComplexVector y = kron3_apply(nullptr, nullptr, &Mx, x);
  for (int s = 0; s < 16; ++s) {
    const ComplexVector ref = Mx * x.segment(4 * s, 4);
    EXPECT_LT((y.segment(4 * s, 4) - ref).cwiseAbs().maxCoeff(), 1e-13 * ref.cwiseAbs().maxCoeff());
  }
}

TEST(Kron3, RejectsWrongLength) {
  const ComplexMatrix M = ComplexMatrix::Identity(3, 3);
  const ComplexVector x = ComplexVector::Zero(26);
  EXPECT_THROW(kron3_apply(&M, &M, &M, x), SolverError);
}

TEST(Kron3, Linearity) {
  std::mt19937_64 rng(4);
  const int m = 6;
  const ComplexMatrix Mz = random_matrix(m, rng);
  const ComplexMatrix My = random_matrix(m, rng);
  const ComplexMatrix Mx = random_matrix(m, rng);
  const ComplexVector x = oracle::random_vector(m * m * m, rng);
  const ComplexVector y = oracle::random_vector(m * m * m, rng);
  const cplx a{0.3, -1.2};
  const cplx b{-2.0, 0.7};
  const ComplexVector lhs = kron3_apply(&Mz, &My, &Mx, a * x + b * y);
  const ComplexVector rhs = a * kron3_apply(&Mz, &My, &Mx, x) + b * kron3_apply(&Mz, &My, &Mx, y);
  EXPECT_LT(rel(lhs, rhs), 1e-13);
}

// vec(N X M^T) = (M ⊗ N) vec(X), checked through the 2D slab of the axis kernel.
TEST(Kron3, RothIdentity) {
  std::mt19937_64 rng(5);
  for (int m = 1; m <= 6; ++m) {
    const ComplexMatrix M = random_matrix(m, rng);
    const ComplexMatrix N = random_matrix(m, rng);
    const ComplexMatrix X = random_matrix(m, rng);
    const ComplexMatrix Y = N * X * M.transpose();
    const ComplexVector vecX = Eigen::Map<const ComplexVector>(X.data(), m * m);
    const ComplexVector vecY = Eigen::Map<const ComplexVector>(Y.data(), m * m);
    EXPECT_LT(rel(dense_kron(M, N) * vecX, vecY), 1e-13) << "m=" << m;

    // Same identity through the three-factor kernel with an identity z factor.
    const ComplexMatrix I = ComplexMatrix::Identity(m, m);
    ComplexVector x3 = ComplexVector::Zero(m * m * m);
    x3.head(m * m) = vecX;
    const ComplexVector y3 = kron3_apply(&I, &M, &N, x3);
    EXPECT_LT(rel(y3.head(m * m), vecY), 1e-13) << "m=" << m;
  }
}
