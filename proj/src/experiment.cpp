#include "hps/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hps/error.hpp"
#include "hps/parallel.hpp"

namespace hps {

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw SolverError(ErrorCode::Configuration, msg);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    config_error("invalid number for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    config_error("invalid integer for '" + key + "': " + value);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value.empty() || value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  config_error("invalid boolean for '" + key + "': " + value);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (leaves < 1) config_error("leaves must be >= 1");
  if (order < 4) config_error("order must be >= 4");
  if (!ppw.empty() && kappa) config_error("give either ppw or kappa, not both");
  if (ppw.empty() && !kappa) config_error("one of ppw or kappa is required");
  for (double p : ppw) {
    if (!(p > 0.0)) config_error("ppw must be positive");
  }
  if (kappa && !(*kappa > 0.0)) config_error("kappa must be positive");
  if (tol && digits) config_error("give either tol or digits, not both");
  if (tol && !(*tol > 0.0 && *tol < 1.0)) config_error("tol must lie in (0, 1)");
  if (digits && *digits < 1) config_error("digits must be >= 1");
  if (restart < 1) config_error("restart must be >= 1");
  if (max_iterations < 1) config_error("max-iterations must be >= 1");
  if (inner_tol && !(*inner_tol > 0.0 && *inner_tol < 1.0)) {
    config_error("inner-tol must lie in (0, 1)");
  }
  if (inner_maxit < 1) config_error("inner-maxit must be >= 1");
  if (threads < 0) config_error("threads must be >= 0");
  if (eta && eta->real() == 0.0) config_error("eta needs a nonzero real part");
}

double ExperimentConfig::outer_tolerance() const {
  if (tol) return *tol;
  if (digits) return rprr_tolerance(*digits);
  return 1e-8;
}

double ExperimentConfig::inner_tolerance() const {
  if (inner_tol) return *inner_tol;
  return std::clamp(outer_tolerance(), 1e-13, 1e-10);
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "problem") {
    cfg.problem = parse_problem(value);
  } else if (key == "leaves") {
    cfg.leaves = parse_int(key, value);
  } else if (key == "order") {
    cfg.order = parse_int(key, value);
  } else if (key == "ppw") {
    cfg.ppw.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.ppw.push_back(parse_double(key, trim(item)));
  } else if (key == "kappa") {
    cfg.kappa = parse_double(key, value);
  } else if (key == "tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "digits") {
    cfg.digits = parse_int(key, value);
  } else if (key == "eta") {
    cfg.eta = cplx{parse_double(key, value), 0.0};
  } else if (key == "threads") {
    cfg.threads = parse_int(key, value);
  } else if (key == "restart") {
    cfg.restart = parse_int(key, value);
  } else if (key == "max-iterations") {
    cfg.max_iterations = parse_int(key, value);
  } else if (key == "inner-tol") {
    cfg.inner_tol = parse_double(key, value);
  } else if (key == "inner-maxit") {
    cfg.inner_maxit = parse_int(key, value);
  } else if (key == "flexible") {
    cfg.flexible = parse_bool(key, value);
  } else if (key == "deterministic") {
    cfg.deterministic = parse_bool(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "vtk") {
    cfg.write_vtk = parse_bool(key, value);
  } else if (key == "vtk-resolution") {
    cfg.vtk_resolution = parse_int(key, value);
  } else {
    config_error("unknown setting '" + key + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.threads > 0) set_thread_count(cfg.threads);

  ExperimentResult res;
  res.config = cfg;
  res.kappa = cfg.kappa ? *cfg.kappa : kappa_for_ppw(cfg.ppw.front(), cfg.leaves, cfg.order);
  res.ppw = ppw_for_kappa(res.kappa, cfg.leaves, cfg.order);
  res.tolerance = cfg.outer_tolerance();

  const ManufacturedProblem problem = make_problem(cfg.problem, res.kappa, cfg.eta);
  const ProblemSpec spec = problem.spec();
  spec.validate();

  const auto t0 = std::chrono::steady_clock::now();
  GlobalOperator A(build_mesh(cfg.leaves), cfg.order, res.kappa, problem.eta(), spec.b_eval);
  InnerSolveConfig inner;
  inner.interior_tol = cfg.inner_tolerance();
  inner.schur_tol = cfg.inner_tolerance();
  inner.interior_maxit = cfg.inner_maxit;
  inner.schur_maxit = cfg.inner_maxit;
  BlockJacobi J(A, inner);
  const ComplexVector rhs = assemble_rhs(spec, A);
  res.setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.unknowns = static_cast<long>(A.size());

  KrylovConfig kc;
  kc.restart = cfg.restart;
  kc.max_iterations = cfg.max_iterations;
  kc.rel_reduction = res.tolerance;
  kc.flexible = cfg.flexible;
  kc.deterministic = cfg.deterministic;
  const LinearMap apply_A = [&A](const ComplexVector& in, ComplexVector& out) { A.apply(in, out); };
  const LinearMap apply_P = [&J](const ComplexVector& in, ComplexVector& out) { J.apply(in, out); };
  GmresResult sol = gmres_solve(apply_A, apply_P, rhs, ComplexVector::Zero(A.size()), kc);
  res.report = std::move(sol.report);
  res.solution = std::move(sol.x);
  res.inner = J.history();
  if (problem.has_exact()) res.error = compute_error(res.solution, problem, A);

  if (!cfg.out_dir.empty()) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_report_json(res, dir / "report.json");
    write_residuals_csv(res.report, dir / "residuals.csv");
    if (cfg.write_vtk) {
      const int per_axis = std::min(128, cfg.leaves * (cfg.order - 2));
      write_slices_vtk(A, res.solution, cfg.vtk_resolution > 0 ? cfg.vtk_resolution : per_axis,
                       dir);
    }
  }
  return res;
}

cplx interpolate_solution(const GlobalOperator& A, const ComplexVector& u, const Point& x) {
  const MeshTopology& mesh = A.mesh();
  const int L = mesh.leaves_per_side();
  std::array<int, 3> g{};
  for (std::size_t a = 0; a < 3; ++a) {
    g[a] = std::clamp(static_cast<int>(std::floor(x[a] * L)), 0, L - 1);
  }
  const long id = mesh.leaf_id(g[0], g[1], g[2]);
  const LeafOperator& leaf = A.leaf(id);
  const SpectralBasis& basis = leaf.basis();
  const int m = basis.n_c - 2;

  // Lagrange basis over the interior nodes, per axis.
  std::array<std::vector<double>, 3> ell;
  for (std::size_t a = 0; a < 3; ++a) {
    ell[a].assign(static_cast<std::size_t>(m), 1.0);
    const double t = x[a] - leaf.box().lower[a];
    for (int j = 0; j < m; ++j) {
      const double xj = basis.nodes(j + 1);
      double prod = 1.0;
      for (int k = 0; k < m; ++k) {
        if (k != j) prod *= (t - basis.nodes(k + 1)) / (xj - basis.nodes(k + 1));
      }
      ell[a][static_cast<std::size_t>(j)] = prod;
    }
  }
  const cplx* block = u.data() + A.block_offset(id);
  cplx sum = 0.0;
  for (int iz = 0; iz < m; ++iz) {
    for (int iy = 0; iy < m; ++iy) {
      const double wyz = ell[1][static_cast<std::size_t>(iy)] * ell[2][static_cast<std::size_t>(iz)];
      for (int ix = 0; ix < m; ++ix) {
        sum += block[leaf.map().interior(ix, iy, iz)] * (ell[0][static_cast<std::size_t>(ix)] * wyz);
      }
    }
  }
  return sum;
}

void write_report_json(const ExperimentResult& r, const std::filesystem::path& file) {
  using nlohmann::json;
  const ExperimentConfig& c = r.config;
  json config = {{"problem", problem_name(c.problem)},
                 {"leaves", c.leaves},
                 {"order", c.order},
                 {"ppw", c.ppw},
                 {"threads", c.threads},
                 {"restart", c.restart},
                 {"max_iterations", c.max_iterations},
                 {"inner_tol", c.inner_tolerance()},
                 {"inner_maxit", c.inner_maxit},
                 {"flexible", c.flexible},
                 {"deterministic", c.deterministic}};
  config["kappa"] = c.kappa ? json(*c.kappa) : json(nullptr);
  config["tol"] = c.tol ? json(*c.tol) : json(nullptr);
  config["digits"] = c.digits ? json(*c.digits) : json(nullptr);

  const SolveReport& s = r.report;
  const auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json inner_totals = json::array();
  for (const ApplicationStats& a : r.inner) {
    inner_totals.push_back({{"interior", a.interior_iterations},
                            {"schur", a.schur_iterations},
                            {"nested_interior", a.nested_iterations}});
  }
  json doc = {{"config", config},
              {"kappa", r.kappa},
              {"ppw", r.ppw},
              {"tolerance", r.tolerance},
              {"unknowns", r.unknowns},
              {"setup_seconds", r.setup_seconds},
              {"solve",
               {{"status", status_name(s.status)},
                {"converged", s.converged},
                {"iterations", s.iterations},
                {"restarts", s.restarts},
                {"estimated_reduction", s.estimated_reduction},
                {"true_reduction", finite_or_null(s.true_reduction)},
                {"unpreconditioned_reduction", finite_or_null(s.unpreconditioned_reduction)},
                {"wall_seconds", s.wall_seconds}}},
              {"inner_iterations", inner_totals}};
  if (r.error) {
    doc["error"] = {{"relative_error", r.error->relative_error},
                    {"digits", finite_or_null(r.error->digits)}};
  } else {
    doc["error"] = nullptr;
  }
  std::ofstream out(file);
  if (!out) throw SolverError(ErrorCode::Configuration, "cannot write " + file.string());
  out << doc.dump(2) << '\n';
}

void write_residuals_csv(const SolveReport& r, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw SolverError(ErrorCode::Configuration, "cannot write " + file.string());
  out << "iteration,relative_residual\n" << std::setprecision(17);
  for (std::size_t k = 0; k < r.history.size(); ++k) out << k << ',' << r.history[k] << '\n';
}

void write_table_csv(const std::vector<ExperimentResult>& rows, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw SolverError(ErrorCode::Configuration, "cannot write " + file.string());
  out << "ppw,kappa,leaves,order,unknowns,tolerance,converged,iterations,relative_error,digits,"
         "setup_seconds,solve_seconds\n"
      << std::setprecision(10);
  for (const ExperimentResult& r : rows) {
    out << r.ppw << ',' << r.kappa << ',' << r.config.leaves << ',' << r.config.order << ','
        << r.unknowns << ',' << r.tolerance << ',' << (r.report.converged ? 1 : 0) << ','
        << r.report.iterations << ',';
    if (r.error) {
      out << r.error->relative_error << ',' << r.error->digits;
    } else {
      out << ',';
    }
    out << ',' << r.setup_seconds << ',' << r.report.wall_seconds << '\n';
  }
}

void write_slices_vtk(const GlobalOperator& A, const ComplexVector& u, int resolution,
                      const std::filesystem::path& dir) {
  const int R = std::max(2, resolution);
  const double step = 1.0 / (R - 1);
  for (int axis = 0; axis < 3; ++axis) {
    const char name = "xyz"[axis];
    std::vector<cplx> values;
    values.reserve(static_cast<std::size_t>(R) * R);
    std::array<int, 3> dims{R, R, R};
    dims[static_cast<std::size_t>(axis)] = 1;
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    origin[static_cast<std::size_t>(axis)] = 0.5;
    // VTK point order: x fastest, then y, then z.
    for (int k = 0; k < dims[2]; ++k) {
      for (int j = 0; j < dims[1]; ++j) {
        for (int i = 0; i < dims[0]; ++i) {
          Point p{origin[0] + i * step, origin[1] + j * step, origin[2] + k * step};
          values.push_back(interpolate_solution(A, u, p));
        }
      }
    }
    std::ofstream out(dir / (std::string("slice_") + name + ".vtk"));
    if (!out) throw SolverError(ErrorCode::Configuration, "cannot write VTK slice");
    out << "# vtk DataFile Version 3.0\n"
        << "solution on plane " << name << " = 0.5\n"
        << "ASCII\nDATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << dims[0] << ' ' << dims[1] << ' ' << dims[2] << '\n'
        << "ORIGIN " << origin[0] << ' ' << origin[1] << ' ' << origin[2] << '\n'
        << "SPACING " << step << ' ' << step << ' ' << step << '\n'
        << "POINT_DATA " << values.size() << '\n'
        << std::setprecision(12);
    const auto field = [&](const char* label, auto&& f) {
      out << "SCALARS " << label << " double 1\nLOOKUP_TABLE default\n";
      for (const cplx& v : values) out << f(v) << '\n';
    };
    field("real", [](const cplx& v) { return v.real(); });
    field("imag", [](const cplx& v) { return v.imag(); });
    field("abs", [](const cplx& v) { return std::abs(v); });
  }
}

}  // namespace hps
