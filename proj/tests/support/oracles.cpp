#include "oracles.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "hps/mesh.hpp"

namespace oracle {

RealVector nodes(int n_c, double h) {
  RealVector x(n_c);
  for (int j = 0; j < n_c; ++j) {
    x(j) = 0.5 * h * (1.0 - std::cos(std::numbers::pi * j / (n_c - 1)));
  }
  return x;
}

RealMatrix barycentric_derivative(const RealVector& x) {
  const auto n = x.size();
  RealVector w = RealVector::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) w(j) /= (x(j) - x(k));
    }
  }
  RealMatrix D = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      D(i, j) = (w(j) / w(i)) / (x(i) - x(j));
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D;
}

namespace {

RealMatrix kron(const RealMatrix& A, const RealMatrix& B) {
  RealMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

int lattice_index(const std::array<int, 3>& p, int n_c) {
  return p[0] + n_c * (p[1] + n_c * p[2]);
}

}  // namespace

std::array<RealMatrix, 3> lattice_derivatives(int n_c, double h) {
  const RealMatrix D = barycentric_derivative(nodes(n_c, h));
  const RealMatrix I = RealMatrix::Identity(n_c, n_c);
  return {kron(I, kron(I, D)), kron(I, kron(D, I)), kron(D, kron(I, I))};
}

std::vector<std::array<int, 3>> local_lattice(int n_c) {
  const int m = n_c - 2;
  std::vector<std::array<int, 3>> pos;
  for (int iz = 1; iz <= m; ++iz) {
    for (int iy = 1; iy <= m; ++iy) {
      for (int ix = 1; ix <= m; ++ix) pos.push_back({ix, iy, iz});
    }
  }
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const int t0 = axis == 0 ? 1 : 0;
      const int t1 = axis == 2 ? 1 : 2;
      for (int b = 1; b <= m; ++b) {
        for (int a = 1; a <= m; ++a) {
          std::array<int, 3> p{};
          p[axis] = side == 0 ? 0 : n_c - 1;
          p[t0] = a;
          p[t1] = b;
          pos.push_back(p);
        }
      }
    }
  }
  return pos;
}

DenseLeaf dense_leaf(const hps::Box& box, int n_c, double kappa, cplx eta,
                     const hps::ScalarField& b) {
  const auto D = lattice_derivatives(n_c, box.edge);
  const RealVector x = nodes(n_c, box.edge);
  const auto pos = local_lattice(n_c);
  const int m = n_c - 2;
  const auto n = static_cast<Eigen::Index>(pos.size());
  const Eigen::Index n_i = static_cast<Eigen::Index>(m) * m * m;
  const Eigen::Index n_b = n - n_i;

  RealMatrix Lap = RealMatrix::Zero(D[0].rows(), D[0].cols());
  for (const RealMatrix& Dk : D) Lap += Dk * Dk;

  DenseLeaf out;
  out.A = ComplexMatrix::Zero(n, n);
  out.G = ComplexMatrix::Zero(n_b, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& p = pos[static_cast<std::size_t>(r)];
    hps::Point c{};
    for (int a = 0; a < 3; ++a) {
      if (p[a] == 0) {
        c[a] = box.lower[a];
      } else if (p[a] == n_c - 1) {
        c[a] = box.upper[a];
      } else {
        c[a] = box.lower[a] + x(p[a]);
      }
    }
    out.coords.push_back(c);
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& p = pos[static_cast<std::size_t>(r)];
    const int row = lattice_index(p, n_c);
    if (r < n_i) {
      for (Eigen::Index col = 0; col < n; ++col) {
        out.A(r, col) = -Lap(row, lattice_index(pos[static_cast<std::size_t>(col)], n_c));
      }
      out.A(r, r) -= kappa * kappa * (1.0 - b(out.coords[static_cast<std::size_t>(r)]));
      continue;
    }
    int axis = 0;
    while (p[axis] != 0 && p[axis] != n_c - 1) ++axis;
    const double sign = p[axis] == 0 ? -1.0 : 1.0;
    for (Eigen::Index col = 0; col < n; ++col) {
      const double flux = sign * D[axis](row, lattice_index(pos[static_cast<std::size_t>(col)], n_c));
      out.A(r, col) = flux;
      out.G(r - n_i, col) = flux;
    }
    out.A(r, r) += hps::kI * eta;
    out.G(r - n_i, r) -= hps::kI * eta;
  }
  return out;
}

Eigen::SparseMatrix<cplx> assemble_global(const hps::GlobalOperator& A, const hps::ScalarField& b) {
  const long leaves = A.mesh().leaf_count();
  const int n_c = A.basis().n_c;
  const Eigen::Index n = A.leaf_size();
  const Eigen::Index n_i = static_cast<Eigen::Index>(n_c - 2) * (n_c - 2) * (n_c - 2);

  std::vector<DenseLeaf> dense;
  for (long t = 0; t < leaves; ++t) {
    const auto& leaf = A.leaf(t);
    dense.push_back(dense_leaf(A.mesh().box(t), n_c, leaf.kappa(), leaf.eta(), b));
  }
  // Boundary node lookup by physical position.
  std::map<std::array<double, 3>, std::vector<std::pair<long, Eigen::Index>>> owners;
  for (long t = 0; t < leaves; ++t) {
    for (Eigen::Index k = n_i; k < n; ++k) owners[dense[t].coords[k]].push_back({t, k});
  }

  std::vector<Eigen::Triplet<cplx>> trip;
  for (long t = 0; t < leaves; ++t) {
    const Eigen::Index off = t * n;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        if (dense[t].A(r, c) != 0.0) trip.emplace_back(off + r, off + c, dense[t].A(r, c));
      }
      if (r < n_i) continue;
      for (const auto& [u, k] : owners[dense[t].coords[r]]) {
        if (u == t) continue;
        // Continuity of impedance data across the face: f_t = -g_u.
        for (Eigen::Index c = 0; c < n; ++c) {
          const cplx g = dense[u].G(k - n_i, c);
          if (g != 0.0) trip.emplace_back(off + r, u * n + c, g);
        }
      }
    }
  }
  Eigen::SparseMatrix<cplx> S(leaves * n, leaves * n);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

ComplexVector random_vector(hps::index_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  ComplexVector v(n);
  for (hps::index_t k = 0; k < n; ++k) v(k) = cplx{d(rng), d(rng)};
  return v;
}

}  // namespace oracle
