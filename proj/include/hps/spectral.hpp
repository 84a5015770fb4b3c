#pragma once

#include <span>

#include "hps/types.hpp"

namespace hps {

/// One-dimensional Chebyshev (extreme point) machinery for a leaf of edge h.
///
/// `L1` is the interior block of `D1 * D1`; `B1` holds the two columns of the
/// same product that couple interior nodes to the endpoints (0 and h).
struct SpectralBasis {
  int n_c = 0;
  double h = 0.0;
  RealVector nodes;  // n_c points in [0, h], increasing
  RealMatrix D1;     // n_c x n_c
  RealMatrix L1;     // (n_c-2) x (n_c-2)
  RealMatrix B1;     // (n_c-2) x 2

  int interior_count() const { return n_c - 2; }
};

/// Chebyshev extreme points mapped to [0, h]. Accepts n_c >= 2.
RealVector chebyshev_nodes(int n_c, double h);

/// First-derivative collocation matrix on chebyshev_nodes(n_c, h). Accepts n_c >= 2.
RealMatrix chebyshev_derivative(int n_c, double h);

/// Throws SolverError(Sizing) for n_c < 4 and InvalidArgument for h <= 0.
SpectralBasis build_basis(int n_c, double h);

/// Eigen-decomposition L1 = V diag(E) V^{-1}, eigenvalues ordered by real part
/// and then imaginary part.
struct EigFactor {
  ComplexMatrix V;
  ComplexVector E;
  ComplexMatrix Vinv;
  double condition = 1.0;  // 1-norm condition estimate of V

  int size() const { return static_cast<int>(E.size()); }
  /// True when V and E carry no imaginary part (the usual case for L1).
  bool is_real(double tol = 0.0) const;
};

EigFactor eig_factor(const SpectralBasis& basis);

// ---------------------------------------------------------------------------
// Kronecker kernels.
//
// A tensor vector of size m^3 is stored with the x index fastest:
// idx = ix + m*iy + m*m*iz, so (Mz ⊗ My ⊗ Mx) acts with Mx on x, My on y and
// Mz on z. Batched kernels treat `batch` such vectors stored back to back.

enum class Accumulate { Assign, Add, Subtract };

namespace kron {

template <typename Derived>
void apply_axis(int axis, const Eigen::MatrixBase<Derived>& M, const cplx* x, cplx* y, index_t m,
                index_t batch = 1, Accumulate mode = Accumulate::Assign) {
  using ConstMap = Eigen::Map<const ComplexMatrix>;
  using Map = Eigen::Map<ComplexMatrix>;
  const auto update = [mode](Map&& out, const auto& product) {
    switch (mode) {
      case Accumulate::Assign: out.noalias() = product; break;
      case Accumulate::Add: out.noalias() += product; break;
      case Accumulate::Subtract: out.noalias() -= product; break;
    }
  };
  const index_t m2 = m * m;
  const index_t m3 = m2 * m;
  switch (axis) {
    case 0:
      update(Map(y, m, m2 * batch), M * ConstMap(x, m, m2 * batch));
      break;
    case 1:
      for (index_t s = 0; s < m * batch; ++s) {
        update(Map(y + s * m2, m, m), ConstMap(x + s * m2, m, m) * M.transpose());
      }
      break;
    case 2:
      for (index_t b = 0; b < batch; ++b) {
        update(Map(y + b * m3, m2, m), ConstMap(x + b * m3, m2, m) * M.transpose());
      }
      break;
    default:
      break;
  }
}

}  // namespace kron

/// y = (Mz ⊗ My ⊗ Mx) x. A null factor is the identity and is skipped.
/// All non-null factors must be m x m with length(x) = m^3.
ComplexVector kron3_apply(const ComplexMatrix* Mz, const ComplexMatrix* My,
                          const ComplexMatrix* Mx, std::span<const cplx> x);
inline ComplexVector kron3_apply(const ComplexMatrix* Mz, const ComplexMatrix* My,
                                 const ComplexMatrix* Mx, const ComplexVector& x) {
  return kron3_apply(Mz, My, Mx, std::span<const cplx>(x.data(), static_cast<std::size_t>(x.size())));
}

}  // namespace hps
