#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "hps/types.hpp"

namespace hps {

/// out = Op(in). `out` may need resizing; it never aliases `in`.
using LinearMap = std::function<void(const ComplexVector& in, ComplexVector& out)>;

struct KrylovConfig {
  int restart = 200;
  int max_iterations = 5000;
  /// Target reduction of the monitored residual relative to its initial value.
  double rel_reduction = 1e-8;
  /// Right-preconditioned flexible GMRES (preconditioner may vary between applications).
  bool flexible = false;
  bool record_history = true;
  /// Fixed-order reductions; when false, dot products use a threaded reduction.
  bool deterministic = true;
  /// Recompute the preconditioned residual from scratch after the solve.
  bool verify_final = true;

  /// Throws SolverError(Configuration) on invalid settings.
  void validate() const;
};

enum class KrylovStatus { Converged, MaxIterations, Breakdown };

std::string_view status_name(KrylovStatus s);

struct SolveReport {
  KrylovStatus status = KrylovStatus::MaxIterations;
  bool converged = false;
  int iterations = 0;
  int restarts = 0;
  /// Monitored residual over its initial value, one entry per iteration
  /// (entry 0 is the initial residual, 1.0).
  std::vector<double> history;
  /// History index at which each restart cycle begins.
  std::vector<int> cycle_starts;
  double initial_residual = 0.0;
  /// Reduction estimated by the Givens recurrence at exit.
  double estimated_reduction = 0.0;
  /// ‖P(b - Ax)‖ / ‖P(b - Ax0)‖ recomputed from scratch (NaN if not verified).
  double true_reduction = 0.0;
  /// ‖b - Ax‖ / ‖b - Ax0‖, for diagnostics (NaN if not verified).
  double unpreconditioned_reduction = 0.0;
  double wall_seconds = 0.0;
};

struct GmresResult {
  ComplexVector x;
  SolveReport report;
};

/// Restarted GMRES with modified Gram-Schmidt Arnoldi and Givens least squares.
///
/// Standard mode solves P A x = P b and stops once ‖P(b - A x)‖ falls below
/// rel_reduction * ‖P(b - A x0)‖. Flexible mode iterates on A P and monitors
/// the unpreconditioned residual ‖b - A x‖ instead.
GmresResult gmres_solve(const LinearMap& apply_A, const LinearMap& apply_P, const ComplexVector& b,
                        const ComplexVector& x0, const KrylovConfig& cfg);

/// GMRES stopping reduction for a discretization expected to deliver
/// `expected_digits` correct digits: 10^-(digits + 2).
double rprr_tolerance(int expected_digits);

}  // namespace hps
