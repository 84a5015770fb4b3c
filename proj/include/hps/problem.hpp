#pragma once

#include <optional>
#include <string_view>

#include "hps/mesh.hpp"

namespace hps {

enum class ProblemKind { Plane, Bumps, Scatter };

std::string_view problem_name(ProblemKind kind);
/// Parses "plane", "bumps" or "scatter"; throws Configuration otherwise.
ProblemKind parse_problem(std::string_view name);

/// Scattering potential used by all global runs:
/// b(x) = -1.5 exp(-160 |x - (0.5, 0.5, 0.5)|^2).
cplx gaussian_bump(const Point& x);
/// Origin-centred variant +1.5 exp(-160 |x|^2), used for single-leaf timing.
cplx gaussian_bump_at_origin(const Point& x);

/// Manufactured Helmholtz problem on the unit cube with b = gaussian_bump.
///
/// Plane:   u = exp(iκ(x+y+z)) e^x cosh(y) (z+1)^2
/// Bumps:   u = (1+e^{iκx})(1+e^{iκy})(1+e^{iκz}) ln(1 + x^2 + y^2 + z^2)
/// Scatter: s = b(x) e^{iκx}, t = 0, no exact solution.
///
/// For Plane and Bumps, s = -Δu - κ²(1-b)u and t = ∂u/∂n + iηu are formed from
/// closed-form derivatives.
class ManufacturedProblem {
 public:
  ManufacturedProblem(ProblemKind kind, double kappa, cplx eta);

  ProblemKind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  cplx eta() const { return eta_; }
  bool has_exact() const { return kind_ != ProblemKind::Scatter; }

  cplx b(const Point& x) const { return gaussian_bump(x); }
  /// Exact solution and derivatives; throw Undefined for Scatter.
  cplx u(const Point& x) const;
  std::array<cplx, 3> gradient(const Point& x) const;
  cplx laplacian(const Point& x) const;

  cplx source(const Point& x) const;
  cplx boundary(const Point& x, Face f) const;

  ProblemSpec spec() const;

 private:
  void require_exact() const;

  ProblemKind kind_;
  double kappa_;
  cplx eta_;
};

/// η defaults to κ.
ManufacturedProblem make_problem(ProblemKind kind, double kappa,
                                 std::optional<cplx> eta = std::nullopt);

/// κ = 2π L n_c / ppw, counting all n_c Chebyshev points of every leaf along one axis.
double kappa_for_ppw(double ppw, int leaves_per_side, int n_c);
double ppw_for_kappa(double kappa, int leaves_per_side, int n_c);

struct ErrorMetrics {
  double relative_error = 0.0;
  double digits = 0.0;  // -log10(relative_error)
};

/// Relative discrete l2 error over all stored nodes (interface nodes counted
/// once per adjacent leaf). Throws Undefined when there is no exact solution.
ErrorMetrics compute_error(const ComplexVector& u_h, const ManufacturedProblem& problem,
                           const GlobalOperator& A);
ErrorMetrics relative_error(const ComplexVector& u_h, const ComplexVector& u_exact);

}  // namespace hps
