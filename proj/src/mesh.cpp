#include "hps/mesh.hpp"

#include "hps/error.hpp"
#include "hps/parallel.hpp"

namespace hps {

MeshTopology::MeshTopology(int leaves_per_side) : L_(leaves_per_side) {
  if (L_ < 1) throw SolverError(ErrorCode::InvalidArgument, "mesh needs at least one leaf per side");
  const long count = leaf_count();
  const double edge = 1.0 / L_;
  boxes_.resize(static_cast<std::size_t>(count));
  links_.resize(static_cast<std::size_t>(6 * count));
  for (long id = 0; id < count; ++id) {
    const auto g = grid_index(id);
    Box& box = boxes_[static_cast<std::size_t>(id)];
    box.edge = edge;
    for (std::size_t a = 0; a < 3; ++a) {
      // Face planes computed from grid indices so neighbours agree bitwise.
      box.lower[a] = static_cast<double>(g[a]) / L_;
      box.upper[a] = static_cast<double>(g[a] + 1) / L_;
    }
    for (Face f : kAllFaces) {
      auto n = g;
      const auto axis = static_cast<std::size_t>(face_axis(f));
      n[axis] += face_is_upper(f) ? 1 : -1;
      if (n[axis] < 0 || n[axis] >= L_) continue;
      links_[static_cast<std::size_t>(6 * id + face_index(f))] =
          FaceLink{leaf_id(n[0], n[1], n[2]), opposite(f)};
    }
  }
}

std::array<int, 3> MeshTopology::grid_index(long leaf) const {
  return {static_cast<int>(leaf % L_), static_cast<int>((leaf / L_) % L_),
          static_cast<int>(leaf / (static_cast<long>(L_) * L_))};
}

MeshTopology build_mesh(int leaves_per_side) { return MeshTopology(leaves_per_side); }

void ProblemSpec::validate() const {
  if (eta.real() == 0.0) {
    throw SolverError(ErrorCode::InvalidArgument, "impedance parameter needs Re(eta) != 0");
  }
  if (!b_eval || !s_eval || !t_eval) {
    throw SolverError(ErrorCode::InvalidArgument, "problem is missing b, s or t");
  }
}

GlobalOperator::GlobalOperator(MeshTopology mesh, int n_c, double kappa, cplx eta,
                               const ScalarField& b_eval)
    : mesh_(std::move(mesh)),
      basis_(std::make_shared<const SpectralBasis>(build_basis(n_c, mesh_.leaf_edge()))) {
  leaves_.reserve(static_cast<std::size_t>(mesh_.leaf_count()));
  for (long id = 0; id < mesh_.leaf_count(); ++id) {
    leaves_.emplace_back(mesh_.box(id), basis_, kappa, eta, b_eval);
  }
}

void GlobalOperator::apply(const ComplexVector& v, ComplexVector& w) const {
  require_size(v.size(), size(), "apply_global");
  w.resize(size());
  const index_t n = leaf_size();
  parallel_for(mesh_.leaf_count(), [&](long id) {
    const LeafOperator& leaf = leaves_[static_cast<std::size_t>(id)];
    const cplx* vin = v.data() + id * n;
    cplx* wout = w.data() + id * n;
    leaf.apply_leaf(vin, wout);
    const LeafIndexMap& map = leaf.map();
    for (Face f : kAllFaces) {
      const auto link = mesh_.neighbor(id, f);
      if (!link) continue;
      // F^τ v^τ + G^τ' v^τ' on the shared face realises f_τ = -g_τ'.
      const LeafOperator& other = leaves_[static_cast<std::size_t>(link->leaf)];
      other.extract_outgoing(link->face, v.data() + link->leaf * n,
                             wout + map.interior_size() + map.face_offset(f), Accumulate::Add);
    }
  });
}

ComplexVector GlobalOperator::apply(const ComplexVector& v) const {
  ComplexVector w;
  apply(v, w);
  return w;
}

ComplexVector assemble_rhs(const ProblemSpec& spec, const GlobalOperator& A) {
  spec.validate();
  ComplexVector rhs = ComplexVector::Zero(A.size());
  const index_t n = A.leaf_size();
  const MeshTopology& mesh = A.mesh();
  for (long id = 0; id < mesh.leaf_count(); ++id) {
    const LeafOperator& leaf = A.leaf(id);
    const LeafIndexMap& map = leaf.map();
    const auto& x = leaf.coordinates();
    cplx* block = rhs.data() + id * n;
    for (index_t k = 0; k < map.interior_size(); ++k) {
      block[k] = spec.s_eval(x[static_cast<std::size_t>(k)]);
    }
    for (Face f : kAllFaces) {
      if (!mesh.on_boundary(id, f)) continue;
      const index_t start = map.interior_size() + map.face_offset(f);
      for (index_t k = start; k < start + map.face_size(); ++k) {
        block[k] = spec.t_eval(x[static_cast<std::size_t>(k)], f);
      }
    }
  }
  return rhs;
}

ComplexVector sample_field(const ScalarField& field, const GlobalOperator& A) {
  ComplexVector out(A.size());
  const index_t n = A.leaf_size();
  for (long id = 0; id < A.mesh().leaf_count(); ++id) {
    const auto& x = A.leaf(id).coordinates();
    for (index_t k = 0; k < n; ++k) out(id * n + k) = field(x[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace hps
