#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hps/leaf.hpp"

namespace hps {

struct FaceLink {
  long leaf = -1;
  Face face = Face::XMinus;

  friend bool operator==(const FaceLink&, const FaceLink&) = default;
};

/// Uniform L x L x L partition of the unit cube. Leaves are numbered with the
/// x grid index fastest: id = ix + L*(iy + L*iz).
class MeshTopology {
 public:
  explicit MeshTopology(int leaves_per_side);

  int leaves_per_side() const { return L_; }
  long leaf_count() const { return static_cast<long>(L_) * L_ * L_; }
  double leaf_edge() const { return 1.0 / L_; }

  long leaf_id(int ix, int iy, int iz) const { return ix + static_cast<long>(L_) * (iy + static_cast<long>(L_) * iz); }
  std::array<int, 3> grid_index(long leaf) const;
  const Box& box(long leaf) const { return boxes_[static_cast<std::size_t>(leaf)]; }

  /// Neighbouring leaf across face f, or nullopt when f lies on the domain boundary.
  std::optional<FaceLink> neighbor(long leaf, Face f) const {
    return links_[static_cast<std::size_t>(6 * leaf + face_index(f))];
  }
  bool on_boundary(long leaf, Face f) const { return !neighbor(leaf, f).has_value(); }

 private:
  int L_;
  std::vector<Box> boxes_;
  std::vector<std::optional<FaceLink>> links_;
};

MeshTopology build_mesh(int leaves_per_side);

/// Continuous problem data. The boundary field t receives the face so that it
/// can use the outward normal of the domain.
struct ProblemSpec {
  double kappa = 1.0;
  cplx eta{1.0, 0.0};
  ScalarField b_eval;
  ScalarField s_eval;
  BoundaryField t_eval;
  std::optional<ScalarField> u_exact;

  /// Throws InvalidArgument if Re(η) == 0 or a required field is missing.
  void validate() const;
};

/// Leaves of a mesh plus the matrix-free global operator A.
///
/// Global vectors are leaf-major; each block has length n ordered
/// [interior; boundary] as in LeafIndexMap.
class GlobalOperator {
 public:
  GlobalOperator(MeshTopology mesh, int n_c, double kappa, cplx eta, const ScalarField& b_eval);

  const MeshTopology& mesh() const { return mesh_; }
  const std::vector<LeafOperator>& leaves() const { return leaves_; }
  const LeafOperator& leaf(long id) const { return leaves_[static_cast<std::size_t>(id)]; }
  const SpectralBasis& basis() const { return *basis_; }
  const std::shared_ptr<const SpectralBasis>& basis_ptr() const { return basis_; }

  index_t leaf_size() const { return leaves_.front().map().size(); }
  index_t size() const { return leaf_size() * mesh_.leaf_count(); }
  index_t block_offset(long leaf) const { return leaf * leaf_size(); }

  /// w = A v. Each leaf owns its output block; coupling reads neighbour input blocks only.
  void apply(const ComplexVector& v, ComplexVector& w) const;
  ComplexVector apply(const ComplexVector& v) const;

 private:
  MeshTopology mesh_;
  std::shared_ptr<const SpectralBasis> basis_;
  std::vector<LeafOperator> leaves_;
};

inline ComplexVector apply_global(const GlobalOperator& A, const ComplexVector& v) { return A.apply(v); }

/// Interior entries s(x_k); entries on faces lying on ∂Ω get t(x_k); shared faces get 0.
ComplexVector assemble_rhs(const ProblemSpec& spec, const GlobalOperator& A);

/// Samples a field at every stored node (interface nodes once per adjacent leaf).
ComplexVector sample_field(const ScalarField& field, const GlobalOperator& A);

}  // namespace hps
