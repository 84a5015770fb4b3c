#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "hps/spectral.hpp"
#include "hps/types.hpp"

namespace hps {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Local numbering of a leaf grid with edge and corner nodes removed.
///
/// Interior nodes come first (x fastest), then the six faces in the order
/// -x, +x, -y, +y, -z, +z. Each face is enumerated by its two tangential
/// coordinates (first tangential axis fastest; the axes in increasing order),
/// so two leaves sharing a face list the shared points identically.
class LeafIndexMap {
 public:
  explicit LeafIndexMap(int n_c);

  int n_c() const { return n_c_; }
  /// Interior nodes per direction, n_c - 2.
  int m() const { return m_; }
  index_t interior_size() const { return n_i_; }
  index_t boundary_size() const { return n_b_; }
  index_t face_size() const { return static_cast<index_t>(m_) * m_; }
  index_t size() const { return n_i_ + n_b_; }

  index_t interior(int ix, int iy, int iz) const {
    return ix + static_cast<index_t>(m_) * (iy + static_cast<index_t>(m_) * iz);
  }
  /// Offset of face f inside the boundary block (0-based within I_b).
  index_t face_offset(Face f) const { return face_index(f) * face_size(); }
  /// Leaf-local index of the node with tangential interior indices (a, b) on f.
  index_t boundary(Face f, int a, int b) const {
    return n_i_ + face_offset(f) + a + static_cast<index_t>(m_) * b;
  }

  /// Position of local node k on the full n_c^3 Chebyshev lattice (0..n_c-1 per axis).
  std::array<int, 3> lattice_position(index_t k) const;

  std::vector<index_t> interior_indices() const;
  std::vector<index_t> face_indices(Face f) const;

 private:
  int n_c_;
  int m_;
  index_t n_i_;
  index_t n_b_;
};

/// All discrete blocks of one leaf.
///
/// Rows of the leaf system are [interior PDE rows; impedance rows F] with
/// F = N + iη I(I_b,:) and G = N - iη I(I_b,:) built from the same flux matrix N.
class LeafOperator {
 public:
  LeafOperator(const Box& box, std::shared_ptr<const SpectralBasis> basis, double kappa, cplx eta,
               const ScalarField& b_eval);

  const LeafIndexMap& map() const { return map_; }
  const Box& box() const { return box_; }
  const SpectralBasis& basis() const { return *basis_; }
  const std::shared_ptr<const SpectralBasis>& basis_ptr() const { return basis_; }
  double kappa() const { return kappa_; }
  cplx eta() const { return eta_; }

  /// κ²(1 - b(x_k)) for every local node.
  const ComplexVector& c_diag() const { return c_diag_; }
  const std::vector<Point>& coordinates() const { return coords_; }

  const SparseMatrix& A_ib() const { return a_ib_; }
  const SparseMatrix& F_bi() const { return flux_bi_; }
  /// Boundary columns of the flux matrix N (F_bb without the iη diagonal).
  const SparseMatrix& flux_bb() const { return flux_bb_; }
  SparseMatrix F_bb() const;
  /// G(I_f, :) as an (n_c-2)^2 x n sparse matrix.
  SparseMatrix outgoing_matrix(Face f) const;

  /// w = A_ii v via one-axis Kronecker sweeps; O(n_c^4), A_ii never formed.
  void apply_interior(const cplx* v, cplx* w) const;
  ComplexVector apply_interior(const ComplexVector& v) const;

  /// w = A^τ v with v ordered [interior; boundary].
  void apply_leaf(const cplx* v, cplx* w) const;
  ComplexVector apply_leaf(const ComplexVector& v) const;

  /// out (+)= G(I_f, :) v, the outgoing impedance data on face f.
  void extract_outgoing(Face f, const cplx* v, cplx* out,
                        Accumulate mode = Accumulate::Assign) const;
  ComplexVector extract_outgoing(Face f, const ComplexVector& v) const;

  /// w_b = F_bi v_i + F_bb v_b.
  void apply_impedance(const cplx* v_i, const cplx* v_b, cplx* w_b) const;

 private:
  Box box_;
  std::shared_ptr<const SpectralBasis> basis_;
  LeafIndexMap map_;
  double kappa_;
  cplx eta_;
  ComplexVector c_diag_;
  std::vector<Point> coords_;
  SparseMatrix a_ib_;
  SparseMatrix flux_bi_;
  SparseMatrix flux_bb_;
};

LeafOperator build_leaf(const Box& box, int n_c, double kappa, cplx eta,
                        const ScalarField& b_eval);

}  // namespace hps
