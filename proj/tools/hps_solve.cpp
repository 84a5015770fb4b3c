// Command-line driver for the HPS Helmholtz solver.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hps/error.hpp"
#include "hps/experiment.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitConfiguration = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(hps::ErrorCode code) {
  switch (code) {
    case hps::ErrorCode::NoConvergence: return kExitNoConvergence;
    case hps::ErrorCode::Resonance:
    case hps::ErrorCode::SingularSchur:
    case hps::ErrorCode::EigenFailure: return kExitNumerical;
    default: return kExitConfiguration;
  }
}

void print_summary(const hps::ExperimentResult& r) {
  std::printf("%-8s L=%d n_c=%d ppw=%.4g kappa=%.6g N=%ld tol=%.3g: %s after %d iterations",
              std::string(hps::problem_name(r.config.problem)).c_str(), r.config.leaves,
              r.config.order, r.ppw, r.kappa, r.unknowns, r.tolerance,
              std::string(hps::status_name(r.report.status)).c_str(), r.report.iterations);
  if (r.error) std::printf(", E = %.3e (%.2f digits)", r.error->relative_error, r.error->digits);
  std::printf(", setup %.2fs, solve %.2fs\n", r.setup_seconds, r.report.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HPS solver for the 3D variable-coefficient Helmholtz equation"};
  app.require_subcommand(1);
  CLI::App* solve = app.add_subcommand("solve", "Run one solve or a ppw sweep");

  // Every flag is captured as a raw string and applied on top of the config file.
  std::map<std::string, std::string> flags;
  const auto option = [&](const std::string& name, const std::string& help) {
    solve->add_option_function<std::string>(
        "--" + name, [&flags, name](const std::string& v) { flags[name] = v; }, help);
  };
  option("problem", "plane | bumps | scatter");
  option("leaves", "leaves per side L");
  option("order", "Chebyshev points per leaf edge n_c");
  option("ppw", "points per wavelength; a comma list runs a sweep");
  option("kappa", "wavenumber (instead of --ppw)");
  option("tol", "outer GMRES relative residual reduction");
  option("digits", "expected digits; tolerance = 10^-(digits+2)");
  option("eta", "impedance parameter (default kappa)");
  option("threads", "worker threads (0 = runtime default)");
  option("restart", "outer GMRES restart length");
  option("max-iterations", "outer GMRES iteration cap");
  option("inner-tol", "relative tolerance of the local solves");
  option("inner-maxit", "iteration cap of the local solves");
  option("vtk-resolution", "samples per side of the VTK slices");
  option("out", "output directory");
  solve->add_flag_callback("--flexible", [&flags] { flags["flexible"] = "true"; },
                           "flexible GMRES (right preconditioning)");
  solve->add_flag_callback("--deterministic", [&flags] { flags["deterministic"] = "true"; },
                           "fixed-order reductions (default)");
  solve->add_flag_callback("--fast-reductions", [&flags] { flags["deterministic"] = "false"; },
                           "threaded, order-dependent reductions");
  solve->add_flag_callback("--no-vtk", [&flags] { flags["vtk"] = "false"; }, "skip VTK slices");
  std::string config_path;
  solve->add_option("--config", config_path, "key = value settings file")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  hps::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      for (const auto& [k, v] : hps::read_config_file(config_path)) hps::apply_setting(cfg, k, v);
    }
    for (const auto& [k, v] : flags) hps::apply_setting(cfg, k, v);
    if (cfg.ppw.empty() && !cfg.kappa) cfg.ppw = {24.0};
    cfg.validate();
  } catch (const hps::SolverError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfiguration;
  }

  try {
    std::vector<hps::ExperimentResult> rows;
    bool all_converged = true;
    const std::vector<double> sweep = cfg.kappa ? std::vector<double>{} : cfg.ppw;
    const std::size_t runs = cfg.kappa ? 1 : sweep.size();
    for (std::size_t i = 0; i < runs; ++i) {
      hps::ExperimentConfig one = cfg;
      if (!cfg.kappa) one.ppw = {sweep[i]};
      if (cfg.sweep() && !cfg.out_dir.empty()) {
        one.out_dir = (std::filesystem::path(cfg.out_dir) / ("ppw_" + std::to_string(i))).string();
      }
      hps::ExperimentResult r = hps::run_experiment(one);
      print_summary(r);
      all_converged = all_converged && r.report.converged;
      r.solution.resize(0);
      rows.push_back(std::move(r));
    }
    if (!cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      if (cfg.sweep()) hps::write_table_csv(rows, std::filesystem::path(cfg.out_dir) / "table.csv");
    }
    return all_converged ? kExitConverged : kExitNoConvergence;
  } catch (const hps::SolverError& e) {
    std::cerr << hps::error_code_name(e.code()) << ": " << e.what();
    if (e.leaf()) std::cerr << " (leaf " << *e.leaf() << ')';
    std::cerr << '\n';
    return exit_code_for(e.code());
  }
}
