#include "hps/gmres.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hps/error.hpp"
#include "hps/parallel.hpp"

namespace hps {

namespace {

constexpr double kReorthTrigger = 0.7071067811865476;  // 1/sqrt(2)
constexpr double kBreakdownFloor = 1e-14;

cplx inner(const ComplexVector& a, const ComplexVector& b, bool deterministic) {
  if (deterministic) return a.dot(b);
  const index_t n = a.size();
  double re = 0.0;
  double im = 0.0;
#ifdef HPS_HAVE_OPENMP
#pragma omp parallel for reduction(+ : re, im) schedule(static)
#endif
  for (index_t k = 0; k < n; ++k) {
    const cplx p = std::conj(a(k)) * b(k);
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

double norm(const ComplexVector& a, bool deterministic) {
  return std::sqrt(std::max(0.0, inner(a, a, deterministic).real()));
}

struct Givens {
  double c = 1.0;
  cplx s{0.0, 0.0};

  // Chooses (c, s) so that [c s; -conj(s) c] [a; b] = [r; 0].
  static Givens eliminate(cplx a, cplx b) {
    const double abs_b = std::abs(b);
    if (abs_b == 0.0) return {1.0, 0.0};
    const double abs_a = std::abs(a);
    if (abs_a == 0.0) return {0.0, std::conj(b) / abs_b};
    const double t = std::hypot(abs_a, abs_b);
    return {abs_a / t, (a / abs_a) * std::conj(b) / t};
  }

  void apply(cplx& a, cplx& b) const {
    const cplx top = c * a + s * b;
    b = -std::conj(s) * a + c * b;
    a = top;
  }
};

}  // namespace

void KrylovConfig::validate() const {
  std::ostringstream os;
  if (restart < 1) os << "restart must be >= 1; ";
  if (max_iterations < 0) os << "max_iterations must be >= 0; ";
  if (!(rel_reduction > 0.0 && rel_reduction < 1.0)) os << "rel_reduction must lie in (0, 1); ";
  if (!os.str().empty()) throw SolverError(ErrorCode::Configuration, os.str());
}

std::string_view status_name(KrylovStatus s) {
  switch (s) {
    case KrylovStatus::Converged: return "converged";
    case KrylovStatus::MaxIterations: return "max_iterations";
    case KrylovStatus::Breakdown: return "breakdown";
  }
  return "unknown";
}

double rprr_tolerance(int expected_digits) {
  if (expected_digits < 1) {
    throw SolverError(ErrorCode::InvalidArgument, "expected digits must be >= 1");
  }
  return std::pow(10.0, -(expected_digits + 2));
}

GmresResult gmres_solve(const LinearMap& apply_A, const LinearMap& apply_P, const ComplexVector& b,
                        const ComplexVector& x0, const KrylovConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const index_t n = b.size();
  require_size(x0.size(), n, "gmres initial guess");
  const bool det = cfg.deterministic;
  const bool flexible = cfg.flexible;

  GmresResult result;
  result.x = x0;
  SolveReport& rep = result.report;
  ComplexVector& x = result.x;

  ComplexVector t1(n);
  ComplexVector t2(n);
  // Monitored residual: P(b - Ax) in standard mode, b - Ax in flexible mode.
  const auto residual = [&](ComplexVector& out) {
    if (x.isZero(0.0)) {
      t1 = b;
    } else {
      apply_A(x, t2);
      t1 = b - t2;
    }
    if (flexible) {
      out = t1;
    } else {
      apply_P(t1, out);
    }
  };

  ComplexVector r(n);
  residual(r);
  const double beta0 = norm(r, det);
  rep.initial_residual = beta0;
  const auto finish = [&](KrylovStatus status) {
    rep.status = status;
    rep.converged = status == KrylovStatus::Converged;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (cfg.record_history) rep.history.push_back(beta0 > 0.0 ? 1.0 : 0.0);
  if (beta0 == 0.0) {
    rep.estimated_reduction = 0.0;
    rep.true_reduction = 0.0;
    rep.unpreconditioned_reduction = 0.0;
    finish(KrylovStatus::Converged);
    return result;
  }

  const double target = cfg.rel_reduction * beta0;
  const int m = cfg.restart;
  std::vector<ComplexVector> V;
  std::vector<ComplexVector> Z;
  ComplexMatrix H = ComplexMatrix::Zero(m + 1, m);
  ComplexVector g(m + 1);
  std::vector<Givens> rot(static_cast<std::size_t>(m));
  ComplexVector w(n);
  ComplexVector Pw(n);

  KrylovStatus status = KrylovStatus::MaxIterations;
  double beta = beta0;
  bool first_cycle = true;
  while (true) {
    if (!first_cycle) {
      residual(r);
      beta = norm(r, det);
      ++rep.restarts;
      if (beta <= target) {
        status = KrylovStatus::Converged;
        break;
      }
    }
    first_cycle = false;
    if (rep.iterations >= cfg.max_iterations) break;
    if (cfg.record_history) rep.cycle_starts.push_back(static_cast<int>(rep.history.size()) - 1);

    V.resize(1);
    V[0] = r / beta;
    Z.clear();
    H.setZero();
    g.setZero();
    g(0) = beta;

    int j = 0;
    bool stop = false;
    bool breakdown = false;
    for (; j < m && rep.iterations < cfg.max_iterations; ++j) {
      if (flexible) {
        Z.emplace_back(n);
        apply_P(V[static_cast<std::size_t>(j)], Z.back());
        apply_A(Z.back(), w);
      } else {
        apply_A(V[static_cast<std::size_t>(j)], Pw);
        apply_P(Pw, w);
      }
      const double w_norm0 = norm(w, det);
      for (int i = 0; i <= j; ++i) {
        const cplx h = inner(V[static_cast<std::size_t>(i)], w, det);
        H(i, j) = h;
        w -= h * V[static_cast<std::size_t>(i)];
      }
      double h_next = norm(w, det);
      if (h_next < kReorthTrigger * w_norm0) {
        for (int i = 0; i <= j; ++i) {
          const cplx h = inner(V[static_cast<std::size_t>(i)], w, det);
          H(i, j) += h;
          w -= h * V[static_cast<std::size_t>(i)];
        }
        h_next = norm(w, det);
      }
      H(j + 1, j) = h_next;

      for (int i = 0; i < j; ++i) rot[static_cast<std::size_t>(i)].apply(H(i, j), H(i + 1, j));
      rot[static_cast<std::size_t>(j)] = Givens::eliminate(H(j, j), H(j + 1, j));
      rot[static_cast<std::size_t>(j)].apply(H(j, j), H(j + 1, j));
      H(j + 1, j) = 0.0;
      rot[static_cast<std::size_t>(j)].apply(g(j), g(j + 1));

      ++rep.iterations;
      const double res = std::abs(g(j + 1));
      if (cfg.record_history) rep.history.push_back(res / beta0);
      rep.estimated_reduction = res / beta0;

      if (res <= target) {
        status = KrylovStatus::Converged;
        stop = true;
        ++j;
        break;
      }
      if (h_next <= kBreakdownFloor * w_norm0 || h_next == 0.0) {
        breakdown = true;
        stop = true;
        ++j;
        break;
      }
      V.emplace_back(w / h_next);
    }

    // Back substitution on the rotated upper-triangular system.
    const int k = j;
    if (k > 0) {
      ComplexVector y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
      for (int i = 0; i < k; ++i) {
        x += y(i) * (flexible ? Z[static_cast<std::size_t>(i)] : V[static_cast<std::size_t>(i)]);
      }
    }
    if (breakdown) {
      // Invariant subspace reached: the least-squares solution is exact unless
      // the operator changed between applications.
      status = rep.estimated_reduction <= cfg.rel_reduction ? KrylovStatus::Converged
                                                            : KrylovStatus::Breakdown;
      break;
    }
    if (stop) break;
    if (rep.iterations >= cfg.max_iterations) break;
  }

  rep.true_reduction = std::numeric_limits<double>::quiet_NaN();
  rep.unpreconditioned_reduction = std::numeric_limits<double>::quiet_NaN();
  if (cfg.verify_final) {
    ComplexVector b_minus_ax0 = b;
    if (!x0.isZero(0.0)) {
      apply_A(x0, t2);
      b_minus_ax0 -= t2;
    }
    apply_A(x, t2);
    t1 = b - t2;
    const double unprec0 = norm(b_minus_ax0, det);
    rep.unpreconditioned_reduction = unprec0 > 0.0 ? norm(t1, det) / unprec0 : 0.0;
    apply_P(t1, r);
    double prec0 = beta0;
    if (flexible) {
      apply_P(b_minus_ax0, t2);
      prec0 = norm(t2, det);
    }
    rep.true_reduction = prec0 > 0.0 ? norm(r, det) / prec0 : 0.0;
  }
  finish(status);
  return result;
}

}  // namespace hps
