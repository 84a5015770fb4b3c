#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hps/block_jacobi.hpp"
#include "hps/gmres.hpp"
#include "hps/problem.hpp"

namespace hps {

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Plane;
  int leaves = 2;
  int order = 16;
  /// Exactly one of ppw / kappa; ppw may list several values (sweep mode).
  std::vector<double> ppw;
  std::optional<double> kappa;
  /// Exactly one of tol / digits; digits maps through rprr_tolerance.
  std::optional<double> tol;
  std::optional<int> digits;
  std::optional<cplx> eta;
  int threads = 0;
  int restart = 200;
  int max_iterations = 5000;
  /// Unset: the outer tolerance clamped to [1e-13, 1e-10], so that the local
  /// solves stay at least as tight as the outer solve.
  std::optional<double> inner_tol;
  int inner_maxit = 200;
  bool flexible = false;
  bool deterministic = true;
  std::string out_dir;
  bool write_vtk = true;
  int vtk_resolution = 0;  // 0: L*(n_c-2), capped at 128

  /// Throws Configuration for inconsistent or out-of-range settings.
  void validate() const;
  bool sweep() const { return ppw.size() > 1; }
  double outer_tolerance() const;
  double inner_tolerance() const;
};

/// Applies flat key/value settings (same keys as the CLI flags, without dashes).
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// Reads `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct ExperimentResult {
  ExperimentConfig config;
  double kappa = 0.0;
  double ppw = 0.0;
  double tolerance = 0.0;
  long unknowns = 0;
  SolveReport report;
  std::optional<ErrorMetrics> error;
  std::vector<ApplicationStats> inner;
  double setup_seconds = 0.0;
  ComplexVector solution;
};

/// Runs one solve for a fixed wavenumber (first ppw entry, or kappa).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Evaluates a nodal solution at an arbitrary point of the unit cube by tensor
/// Lagrange interpolation over the interior nodes of the containing leaf.
cplx interpolate_solution(const GlobalOperator& A, const ComplexVector& u, const Point& x);

void write_report_json(const ExperimentResult& r, const std::filesystem::path& file);
void write_residuals_csv(const SolveReport& r, const std::filesystem::path& file);
void write_table_csv(const std::vector<ExperimentResult>& rows, const std::filesystem::path& file);
/// Writes slice_x.vtk, slice_y.vtk, slice_z.vtk (planes through 0.5) into dir.
void write_slices_vtk(const GlobalOperator& A, const ComplexVector& u, int resolution,
                      const std::filesystem::path& dir);

}  // namespace hps
