#include "hps/problem.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hps/error.hpp"

namespace hps {

std::string_view problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Plane: return "plane";
    case ProblemKind::Bumps: return "bumps";
    case ProblemKind::Scatter: return "scatter";
  }
  return "unknown";
}

ProblemKind parse_problem(std::string_view name) {
  if (name == "plane") return ProblemKind::Plane;
  if (name == "bumps") return ProblemKind::Bumps;
  if (name == "scatter") return ProblemKind::Scatter;
  throw SolverError(ErrorCode::Configuration, "unknown problem '" + std::string(name) + "'");
}

cplx gaussian_bump(const Point& x) {
  const double dx = x[0] - 0.5;
  const double dy = x[1] - 0.5;
  const double dz = x[2] - 0.5;
  return -1.5 * std::exp(-160.0 * (dx * dx + dy * dy + dz * dz));
}

cplx gaussian_bump_at_origin(const Point& x) {
  return 1.5 * std::exp(-160.0 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
}

ManufacturedProblem::ManufacturedProblem(ProblemKind kind, double kappa, cplx eta)
    : kind_(kind), kappa_(kappa), eta_(eta) {
  if (!(kappa > 0.0)) throw SolverError(ErrorCode::InvalidArgument, "kappa must be positive");
}

void ManufacturedProblem::require_exact() const {
  if (!has_exact()) {
    throw SolverError(ErrorCode::Undefined, "problem has no closed-form solution");
  }
}

namespace {

// Plane wave factors u = P(x) Q(y) R(z), each returning {value, d, d2}.
struct Factor {
  cplx v, d, dd;
};

Factor plane_x(double k, double x) {
  const cplx a{1.0, k};
  const cplx p = std::exp(a * x);
  return {p, a * p, a * a * p};
}

Factor plane_y(double k, double y) {
  const cplx e = std::exp(kI * (k * y));
  const double ch = std::cosh(y);
  const double sh = std::sinh(y);
  return {e * ch, e * (kI * k * ch + sh), e * (ch * (1.0 - k * k) + 2.0 * kI * k * sh)};
}

Factor plane_z(double k, double z) {
  const cplx e = std::exp(kI * (k * z));
  const double q = z + 1.0;
  return {e * q * q, e * (kI * k * q * q + 2.0 * q), e * (-k * k * q * q + 4.0 * kI * k * q + 2.0)};
}

// 1 + e^{iκt} and its derivatives.
Factor bump_factor(double k, double t) {
  const cplx e = std::exp(kI * (k * t));
  return {1.0 + e, kI * k * e, -k * k * e};
}

}  // namespace

cplx ManufacturedProblem::u(const Point& x) const {
  require_exact();
  const double k = kappa_;
  if (kind_ == ProblemKind::Plane) {
    return plane_x(k, x[0]).v * plane_y(k, x[1]).v * plane_z(k, x[2]).v;
  }
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  return bump_factor(k, x[0]).v * bump_factor(k, x[1]).v * bump_factor(k, x[2]).v *
         std::log1p(r2);
}

std::array<cplx, 3> ManufacturedProblem::gradient(const Point& x) const {
  require_exact();
  const double k = kappa_;
  if (kind_ == ProblemKind::Plane) {
    const Factor p = plane_x(k, x[0]);
    const Factor q = plane_y(k, x[1]);
    const Factor r = plane_z(k, x[2]);
    return {p.d * q.v * r.v, p.v * q.d * r.v, p.v * q.v * r.d};
  }
  const std::array<Factor, 3> f{bump_factor(k, x[0]), bump_factor(k, x[1]), bump_factor(k, x[2])};
  const double s = 1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const double ell = std::log(s);
  const cplx F = f[0].v * f[1].v * f[2].v;
  std::array<cplx, 3> g{};
  for (std::size_t a = 0; a < 3; ++a) {
    const cplx others = f[(a + 1) % 3].v * f[(a + 2) % 3].v;
    g[a] = f[a].d * others * ell + F * (2.0 * x[a] / s);
  }
  return g;
}

cplx ManufacturedProblem::laplacian(const Point& x) const {
  require_exact();
  const double k = kappa_;
  if (kind_ == ProblemKind::Plane) {
    const Factor p = plane_x(k, x[0]);
    const Factor q = plane_y(k, x[1]);
    const Factor r = plane_z(k, x[2]);
    return p.dd * q.v * r.v + p.v * q.dd * r.v + p.v * q.v * r.dd;
  }
  const std::array<Factor, 3> f{bump_factor(k, x[0]), bump_factor(k, x[1]), bump_factor(k, x[2])};
  const double s = 1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const double ell = std::log(s);
  const cplx F = f[0].v * f[1].v * f[2].v;
  cplx lap = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    const cplx others = f[(a + 1) % 3].v * f[(a + 2) % 3].v;
    const double ell_a = 2.0 * x[a] / s;
    const double ell_aa = 2.0 / s - 4.0 * x[a] * x[a] / (s * s);
    lap += f[a].dd * others * ell + 2.0 * f[a].d * others * ell_a + F * ell_aa;
  }
  return lap;
}

cplx ManufacturedProblem::source(const Point& x) const {
  if (kind_ == ProblemKind::Scatter) return b(x) * std::exp(kI * (kappa_ * x[0]));
  return -laplacian(x) - kappa_ * kappa_ * (1.0 - b(x)) * u(x);
}

cplx ManufacturedProblem::boundary(const Point& x, Face f) const {
  if (kind_ == ProblemKind::Scatter) return 0.0;
  const auto g = gradient(x);
  const cplx dn = face_is_upper(f) ? g[static_cast<std::size_t>(face_axis(f))]
                                   : -g[static_cast<std::size_t>(face_axis(f))];
  return dn + kI * eta_ * u(x);
}

ProblemSpec ManufacturedProblem::spec() const {
  ProblemSpec s;
  s.kappa = kappa_;
  s.eta = eta_;
  const ManufacturedProblem self = *this;
  s.b_eval = [self](const Point& x) { return self.b(x); };
  s.s_eval = [self](const Point& x) { return self.source(x); };
  s.t_eval = [self](const Point& x, Face f) { return self.boundary(x, f); };
  if (has_exact()) s.u_exact = [self](const Point& x) { return self.u(x); };
  return s;
}

ManufacturedProblem make_problem(ProblemKind kind, double kappa, std::optional<cplx> eta) {
  return ManufacturedProblem(kind, kappa, eta.value_or(cplx{kappa, 0.0}));
}

double kappa_for_ppw(double ppw, int leaves_per_side, int n_c) {
  if (!(ppw > 0.0)) throw SolverError(ErrorCode::InvalidArgument, "ppw must be positive");
  return 2.0 * std::numbers::pi * leaves_per_side * n_c / ppw;
}

double ppw_for_kappa(double kappa, int leaves_per_side, int n_c) {
  if (!(kappa > 0.0)) throw SolverError(ErrorCode::InvalidArgument, "kappa must be positive");
  return 2.0 * std::numbers::pi * leaves_per_side * n_c / kappa;
}

ErrorMetrics relative_error(const ComplexVector& u_h, const ComplexVector& u_exact) {
  require_size(u_h.size(), u_exact.size(), "relative_error");
  const double ref = u_exact.norm();
  ErrorMetrics e;
  e.relative_error = ref > 0.0 ? (u_h - u_exact).norm() / ref : (u_h - u_exact).norm();
  e.digits = e.relative_error > 0.0 ? -std::log10(e.relative_error)
                                    : std::numeric_limits<double>::infinity();
  return e;
}

ErrorMetrics compute_error(const ComplexVector& u_h, const ManufacturedProblem& problem,
                           const GlobalOperator& A) {
  if (!problem.has_exact()) {
    throw SolverError(ErrorCode::Undefined, "error needs an exact solution");
  }
  require_size(u_h.size(), A.size(), "compute_error");
  return relative_error(u_h, sample_field([&](const Point& x) { return problem.u(x); }, A));
}

}  // namespace hps
