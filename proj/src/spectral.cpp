#include "hps/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hps/error.hpp"

namespace hps {

RealVector chebyshev_nodes(int n_c, double h) {
  if (n_c < 2) throw SolverError(ErrorCode::Sizing, "Chebyshev grid needs at least 2 nodes");
  const int N = n_c - 1;
  RealVector s(n_c);
  // sin form keeps the points exactly antisymmetric about the midpoint.
  for (int j = 0; j <= N; ++j) {
    s(j) = std::sin(std::numbers::pi * (2.0 * j - N) / (2.0 * N));
  }
  return (0.5 * h) * (s.array() + 1.0).matrix();
}

RealMatrix chebyshev_derivative(int n_c, double h) {
  if (n_c < 2) throw SolverError(ErrorCode::Sizing, "Chebyshev grid needs at least 2 nodes");
  const int N = n_c - 1;
  const double half = std::numbers::pi / (2.0 * N);
  const auto weight = [N](int j) { return (j == 0 || j == N) ? 2.0 : 1.0; };

  RealMatrix D = RealMatrix::Zero(n_c, n_c);
  // Upper half of the rows from the trigonometric difference formula; the
  // lower half follows from D(N-i, N-j) = -D(i, j).
  const int top = N / 2;
  for (int i = 0; i <= top; ++i) {
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double diff = 2.0 * std::sin((i + j) * half) * std::sin((i - j) * half);
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = sign * weight(i) / (weight(j) * diff);
    }
  }
  for (int i = top + 1; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      if (i != j) D(i, j) = -D(N - i, N - j);
    }
  }
  // Negative sum trick, smallest magnitudes first.
  std::vector<double> row(static_cast<std::size_t>(n_c));
  for (int i = 0; i <= N; ++i) {
    row.clear();
    for (int j = 0; j <= N; ++j) {
      if (j != i) row.push_back(D(i, j));
    }
    std::sort(row.begin(), row.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    D(i, i) = -std::accumulate(row.begin(), row.end(), 0.0);
  }
  return (2.0 / h) * D;
}

SpectralBasis build_basis(int n_c, double h) {
  if (n_c < 4) {
    std::ostringstream os;
    os << "n_c = " << n_c << " leaves no interior after removing edges (need n_c >= 4)";
    throw SolverError(ErrorCode::Sizing, os.str());
  }
  if (!(h > 0.0)) throw SolverError(ErrorCode::InvalidArgument, "leaf edge must be positive");

  SpectralBasis basis;
  basis.n_c = n_c;
  basis.h = h;
  basis.nodes = chebyshev_nodes(n_c, h);
  basis.D1 = chebyshev_derivative(n_c, h);
  const RealMatrix D2 = basis.D1 * basis.D1;
  const int m = n_c - 2;
  basis.L1 = D2.block(1, 1, m, m);
  basis.B1.resize(m, 2);
  basis.B1.col(0) = D2.block(1, 0, m, 1);
  basis.B1.col(1) = D2.block(1, n_c - 1, m, 1);
  return basis;
}

bool EigFactor::is_real(double tol) const {
  return V.imag().cwiseAbs().maxCoeff() <= tol && E.imag().cwiseAbs().maxCoeff() <= tol;
}

EigFactor eig_factor(const SpectralBasis& basis) {
  Eigen::EigenSolver<RealMatrix> solver(basis.L1, true);
  if (solver.info() != Eigen::Success) {
    throw SolverError(ErrorCode::EigenFailure, "eigensolver did not converge for L1");
  }
  const ComplexVector values = solver.eigenvalues();
  const ComplexMatrix vectors = solver.eigenvectors();
  const index_t m = values.size();

  std::vector<index_t> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), index_t{0});
  std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
    if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });

  EigFactor f;
  f.E.resize(m);
  f.V.resize(m, m);
  for (index_t k = 0; k < m; ++k) {
    f.E(k) = values(order[static_cast<std::size_t>(k)]);
    f.V.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(f.V);
  const double rcond = lu.rcond();
  f.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(f.condition <= 1e12)) {
    std::ostringstream os;
    os << "eigenvector matrix of L1 is numerically singular (condition " << f.condition << ")";
    throw SolverError(ErrorCode::EigenFailure, os.str());
  }
  f.Vinv = lu.inverse();
  return f;
}

ComplexVector kron3_apply(const ComplexMatrix* Mz, const ComplexMatrix* My,
                          const ComplexMatrix* Mx, std::span<const cplx> x) {
  index_t m = -1;
  for (const ComplexMatrix* M : {Mz, My, Mx}) {
    if (M == nullptr) continue;
    if (M->rows() != M->cols()) {
      throw SolverError(ErrorCode::DimensionMismatch, "Kronecker factors must be square");
    }
    if (m >= 0 && M->rows() != m) {
      throw SolverError(ErrorCode::DimensionMismatch, "Kronecker factors differ in size");
    }
    m = M->rows();
  }
  const auto len = static_cast<index_t>(x.size());
  if (m < 0) {
    m = static_cast<index_t>(std::llround(std::cbrt(static_cast<double>(len))));
  }
  require_size(len, m * m * m, "kron3_apply input");

  ComplexVector current = Eigen::Map<const ComplexVector>(x.data(), len);
  ComplexVector scratch(len);
  const std::array<const ComplexMatrix*, 3> by_axis{Mx, My, Mz};
  for (int axis = 0; axis < 3; ++axis) {
    if (by_axis[static_cast<std::size_t>(axis)] == nullptr) continue;
    kron::apply_axis(axis, *by_axis[static_cast<std::size_t>(axis)], current.data(),
                     scratch.data(), m);
    current.swap(scratch);
  }
  return current;
}

}  // namespace hps
