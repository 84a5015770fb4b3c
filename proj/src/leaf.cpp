#include "hps/leaf.hpp"

#include <cmath>

#include "hps/error.hpp"

namespace hps {

namespace {

using Triplet = Eigen::Triplet<cplx>;

// The two tangential axes of a face, in increasing order.
constexpr std::array<int, 2> tangential_axes(Face f) {
  switch (face_axis(f)) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

}  // namespace

LeafIndexMap::LeafIndexMap(int n_c) : n_c_(n_c), m_(n_c - 2) {
  if (n_c < 4) throw SolverError(ErrorCode::Sizing, "leaf grid needs n_c >= 4");
  const auto m = static_cast<index_t>(m_);
  n_i_ = m * m * m;
  n_b_ = 6 * m * m;
}

std::array<int, 3> LeafIndexMap::lattice_position(index_t k) const {
  const index_t m = m_;
  if (k < n_i_) {
    return {static_cast<int>(k % m) + 1, static_cast<int>((k / m) % m) + 1,
            static_cast<int>(k / (m * m)) + 1};
  }
  const index_t r = k - n_i_;
  const auto f = static_cast<Face>(r / face_size());
  const index_t t = r % face_size();
  std::array<int, 3> pos{};
  pos[static_cast<std::size_t>(face_axis(f))] = face_is_upper(f) ? n_c_ - 1 : 0;
  const auto tang = tangential_axes(f);
  pos[static_cast<std::size_t>(tang[0])] = static_cast<int>(t % m) + 1;
  pos[static_cast<std::size_t>(tang[1])] = static_cast<int>(t / m) + 1;
  return pos;
}

std::vector<index_t> LeafIndexMap::interior_indices() const {
  std::vector<index_t> idx(static_cast<std::size_t>(n_i_));
  for (index_t k = 0; k < n_i_; ++k) idx[static_cast<std::size_t>(k)] = k;
  return idx;
}

std::vector<index_t> LeafIndexMap::face_indices(Face f) const {
  std::vector<index_t> idx(static_cast<std::size_t>(face_size()));
  const index_t start = n_i_ + face_offset(f);
  for (index_t k = 0; k < face_size(); ++k) idx[static_cast<std::size_t>(k)] = start + k;
  return idx;
}

LeafOperator::LeafOperator(const Box& box, std::shared_ptr<const SpectralBasis> basis,
                           double kappa, cplx eta, const ScalarField& b_eval)
    : box_(box), basis_(std::move(basis)), map_(basis_->n_c), kappa_(kappa), eta_(eta) {
  if (std::abs(box.edge - basis_->h) > 1e-14 * box.edge) {
    throw SolverError(ErrorCode::InvalidArgument, "leaf edge does not match spectral basis");
  }
  const int n_c = basis_->n_c;
  const int N = n_c - 1;
  const int m = map_.m();
  const index_t n = map_.size();
  const index_t n_i = map_.interior_size();
  const index_t n_b = map_.boundary_size();

  coords_.resize(static_cast<std::size_t>(n));
  c_diag_.resize(n);
  const double k2 = kappa * kappa;
  for (index_t k = 0; k < n; ++k) {
    const auto pos = map_.lattice_position(k);
    Point& x = coords_[static_cast<std::size_t>(k)];
    for (std::size_t a = 0; a < 3; ++a) {
      const int q = pos[a];
      x[a] = q == 0 ? box.lower[a] : (q == N ? box.upper[a] : box.lower[a] + basis_->nodes(q));
    }
    c_diag_(k) = k2 * (1.0 - b_eval(x));
  }

  // Node on lattice line `axis` through the tangential position of `pos`, at
  // lattice coordinate q. Returns the leaf-local index.
  const auto line_node = [&](int axis, std::array<int, 3> pos, int q) -> index_t {
    pos[static_cast<std::size_t>(axis)] = q;
    if (q == 0 || q == N) {
      const Face f = static_cast<Face>(2 * axis + (q == N ? 1 : 0));
      const auto tang = tangential_axes(f);
      return map_.boundary(f, pos[static_cast<std::size_t>(tang[0])] - 1,
                           pos[static_cast<std::size_t>(tang[1])] - 1);
    }
    return map_.interior(pos[0] - 1, pos[1] - 1, pos[2] - 1);
  };

  // A_ib: interior second-derivative rows acting on the two endpoint nodes of
  // each lattice line, -B1 per axis.
  {
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(6 * n_i));
    for (index_t k = 0; k < n_i; ++k) {
      const auto pos = map_.lattice_position(k);
      for (int axis = 0; axis < 3; ++axis) {
        const int p = pos[static_cast<std::size_t>(axis)] - 1;
        trips.emplace_back(k, line_node(axis, pos, 0) - n_i, -basis_->B1(p, 0));
        trips.emplace_back(k, line_node(axis, pos, N) - n_i, -basis_->B1(p, 1));
      }
    }
    a_ib_.resize(n_i, n_b);
    a_ib_.setFromTriplets(trips.begin(), trips.end());
  }

  // Flux matrix N: outward normal derivative at each face node, split into its
  // interior and boundary columns.
  {
    std::vector<Triplet> bi;
    std::vector<Triplet> bb;
    bi.reserve(static_cast<std::size_t>(n_b * m));
    bb.reserve(static_cast<std::size_t>(2 * n_b));
    for (index_t r = 0; r < n_b; ++r) {
      const index_t k = n_i + r;
      const auto pos = map_.lattice_position(k);
      const Face f = static_cast<Face>(r / map_.face_size());
      const int axis = face_axis(f);
      const int row = face_is_upper(f) ? N : 0;
      const double sign = face_is_upper(f) ? 1.0 : -1.0;
      for (int q = 0; q <= N; ++q) {
        const double value = sign * basis_->D1(row, q);
        const index_t col = line_node(axis, pos, q);
        if (col < n_i) {
          bi.emplace_back(r, col, value);
        } else {
          bb.emplace_back(r, col - n_i, value);
        }
      }
    }
    flux_bi_.resize(n_b, n_i);
    flux_bi_.setFromTriplets(bi.begin(), bi.end());
    flux_bb_.resize(n_b, n_b);
    flux_bb_.setFromTriplets(bb.begin(), bb.end());
  }
}

SparseMatrix LeafOperator::F_bb() const {
  SparseMatrix eye(map_.boundary_size(), map_.boundary_size());
  eye.setIdentity();
  SparseMatrix out = flux_bb_ + (kI * eta_) * eye;
  return out;
}

SparseMatrix LeafOperator::outgoing_matrix(Face f) const {
  const index_t n_i = map_.interior_size();
  const index_t off = map_.face_offset(f);
  std::vector<Triplet> trips;
  for (index_t r = 0; r < map_.face_size(); ++r) {
    for (SparseMatrix::InnerIterator it(flux_bi_, off + r); it; ++it) {
      trips.emplace_back(r, it.col(), it.value());
    }
    for (SparseMatrix::InnerIterator it(flux_bb_, off + r); it; ++it) {
      trips.emplace_back(r, n_i + it.col(), it.value());
    }
    trips.emplace_back(r, n_i + off + r, -kI * eta_);
  }
  SparseMatrix G(map_.face_size(), map_.size());
  G.setFromTriplets(trips.begin(), trips.end());
  return G;
}

void LeafOperator::apply_interior(const cplx* v, cplx* w) const {
  const index_t m = map_.m();
  const index_t n_i = map_.interior_size();
  const RealMatrix& L1 = basis_->L1;
  Eigen::Map<const ComplexVector> vin(v, n_i);
  Eigen::Map<ComplexVector> out(w, n_i);
  out = -(c_diag_.head(n_i).array() * vin.array()).matrix();
  for (int axis = 0; axis < 3; ++axis) {
    kron::apply_axis(axis, L1, v, w, m, 1, Accumulate::Subtract);
  }
}

ComplexVector LeafOperator::apply_interior(const ComplexVector& v) const {
  require_size(v.size(), map_.interior_size(), "apply_interior");
  ComplexVector w(map_.interior_size());
  apply_interior(v.data(), w.data());
  return w;
}

void LeafOperator::apply_impedance(const cplx* v_i, const cplx* v_b, cplx* w_b) const {
  const index_t n_i = map_.interior_size();
  const index_t n_b = map_.boundary_size();
  Eigen::Map<const ComplexVector> vi(v_i, n_i);
  Eigen::Map<const ComplexVector> vb(v_b, n_b);
  Eigen::Map<ComplexVector> out(w_b, n_b);
  out.noalias() = flux_bi_ * vi;
  out.noalias() += flux_bb_ * vb;
  out += (kI * eta_) * vb;
}

void LeafOperator::apply_leaf(const cplx* v, cplx* w) const {
  const index_t n_i = map_.interior_size();
  const index_t n_b = map_.boundary_size();
  apply_interior(v, w);
  Eigen::Map<ComplexVector> wi(w, n_i);
  wi.noalias() += a_ib_ * Eigen::Map<const ComplexVector>(v + n_i, n_b);
  apply_impedance(v, v + n_i, w + n_i);
}

ComplexVector LeafOperator::apply_leaf(const ComplexVector& v) const {
  require_size(v.size(), map_.size(), "apply_leaf");
  ComplexVector w(map_.size());
  apply_leaf(v.data(), w.data());
  return w;
}

void LeafOperator::extract_outgoing(Face f, const cplx* v, cplx* out, Accumulate mode) const {
  const index_t n_i = map_.interior_size();
  const index_t n_b = map_.boundary_size();
  const index_t fs = map_.face_size();
  const index_t off = map_.face_offset(f);
  Eigen::Map<const ComplexVector> vi(v, n_i);
  Eigen::Map<const ComplexVector> vb(v + n_i, n_b);
  Eigen::Map<ComplexVector> g(out, fs);
  const double sign = mode == Accumulate::Subtract ? -1.0 : 1.0;
  if (mode == Accumulate::Assign) g.setZero();
  g.noalias() += sign * (flux_bi_.middleRows(off, fs) * vi);
  g.noalias() += sign * (flux_bb_.middleRows(off, fs) * vb);
  g -= (sign * kI * eta_) * vb.segment(off, fs);
}

ComplexVector LeafOperator::extract_outgoing(Face f, const ComplexVector& v) const {
  const int fi = face_index(f);
  if (fi < 0 || fi > 5) throw SolverError(ErrorCode::InvalidArgument, "invalid face");
  require_size(v.size(), map_.size(), "extract_outgoing");
  ComplexVector g(map_.face_size());
  extract_outgoing(f, v.data(), g.data());
  return g;
}

LeafOperator build_leaf(const Box& box, int n_c, double kappa, cplx eta,
                        const ScalarField& b_eval) {
  auto basis = std::make_shared<const SpectralBasis>(build_basis(n_c, box.edge));
  return LeafOperator(box, std::move(basis), kappa, eta, b_eval);
}

}  // namespace hps
