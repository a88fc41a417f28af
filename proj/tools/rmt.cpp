// rmt: command-line front end for the spectral-law solvers, samplers,
// experiments and verification suites.
//
// Exit codes: 0 ok, 2 usage/input error, 3 numerical failure,
// 4 verification-suite bound violation. Errors are reported on stderr as
// a single JSON object.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rmt/concentration.hpp"
#include "rmt/elliptical_solver.hpp"
#include "rmt/errors.hpp"
#include "rmt/experiments.hpp"
#include "rmt/io.hpp"
#include "rmt/linalg.hpp"
#include "rmt/mp_solver.hpp"
#include "rmt/samplers.hpp"

namespace {

using rmt::io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

constexpr std::size_t kDefaultGridPoints = 400;
constexpr std::size_t kScanPoints = 256;

struct SolverFlags {
  double tol = 1e-12;
  int max_iters = 10000;
  double damping = 1.0;
  double v_eps = 0.0;

  void add_to(CLI::App* app) {
    app->add_option("--tol", tol, "fixed-point residual target");
    app->add_option("--max-iters", max_iters, "iteration cap per point");
    app->add_option("--damping", damping, "initial relaxation in (0, 1]");
    app->add_option("--v-eps", v_eps, "imaginary offset for density recovery (0 = default)");
  }

  rmt::SolverConfig config() const {
    rmt::SolverConfig cfg{tol, max_iters, damping, v_eps};
    cfg.validate();
    return cfg;
  }
};

void emit_error(const char* kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

// Writes to the named file, or stdout when the name is empty or "-".
void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rmt::InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw rmt::InputError("write failed for '" + path + "'");
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

std::optional<rmt::GridSpec> parse_grid(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw rmt::InputError("--grid expects min,max,count");
  rmt::GridSpec g;
  try {
    g.lo = std::stod(parts[0]);
    g.hi = std::stod(parts[1]);
    const long long count = std::stoll(parts[2]);
    if (count < 2) throw rmt::InputError("");
    g.count = static_cast<std::size_t>(count);
  } catch (const std::exception&) {
    throw rmt::InputError("--grid expects min,max,count with count >= 2");
  }
  if (!(g.lo < g.hi)) throw rmt::InputError("--grid needs min < max");
  return g;
}

// Grid over [max(0, a - 0.5), b + 0.5] around the support [a, b] found on a
// coarse scan of [0, upper].
template <typename DensityFn>
std::vector<double> default_grid(const DensityFn& density, double upper, double threshold) {
  const auto scan_xs = rmt::linspace(0.0, upper, kScanPoints);
  const auto scan = density(scan_xs);
  const auto support = rmt::support_from_density(scan, threshold);
  if (!support) throw rmt::NumericalError("support scan found no mass", 0.0);
  return rmt::linspace(std::max(0.0, support->first - 0.5), support->second + 0.5, kDefaultGridPoints);
}

std::vector<double> grid_points(const std::optional<rmt::GridSpec>& g) {
  return rmt::linspace(g->lo, g->hi, g->count);
}

std::string density_csv(const std::vector<rmt::DensityPoint>& pts) {
  std::ostringstream os;
  rmt::io::write_density_csv(os, pts);
  return os.str();
}

json support_json(const std::vector<rmt::DensityPoint>& pts, double threshold) {
  const auto s = rmt::support_from_density(pts, threshold);
  return s ? json{s->first, s->second} : json(nullptr);
}

// Summary residuals are re-evaluated from scratch at the recovery offset.
int cmd_solve_mp(const std::string& h_file, double rho, const std::string& grid_text,
                 const SolverFlags& flags, const std::string& out, const std::string& summary) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw rmt::InputError("--rho must be positive");
  const auto h = rmt::io::read_measure_file(h_file);
  if (h.min_value() < 0.0) throw rmt::InputError("H has negative support");
  const auto cfg = flags.config();
  const double v_eps = cfg.v_eps > 0.0 ? cfg.v_eps : rmt::mp_default_v_eps(h, rho);
  const double threshold = 10.0 * v_eps;

  auto density = [&](const std::vector<double>& xs) { return rmt::density_grid(h, rho, xs, cfg); };
  const auto grid = parse_grid(grid_text);
  const auto xs = grid ? grid_points(grid) : default_grid(density, rmt::mp_support_bound(h, rho), threshold);
  const auto pts = density(xs);

  double max_residual = 0.0;
  for (double x : xs) {
    const rmt::Complex z{x, v_eps};
    const auto r = rmt::mp_companion_solve(z, h, rho, cfg);
    max_residual = std::max(max_residual, rmt::mp_residual(z, r.w, h, rho));
  }
  json s{{"rho", rho},
         {"atom0_mass", rmt::mp_atom_at_zero(rho)},
         {"v_eps", v_eps},
         {"support_estimate", support_json(pts, threshold)},
         {"max_residual", max_residual},
         {"grid", {xs.front(), xs.back(), xs.size()}}};
  write_output(out, density_csv(pts));
  if (!summary.empty()) write_output(summary, json_text(s));
  return kExitOk;
}

int cmd_solve_elliptical(const std::string& params_file, const std::string& grid_text,
                         const SolverFlags& flags, const std::string& out, const std::string& summary) {
  const auto params = rmt::io::elliptical_params_from_json(rmt::io::read_json_file(params_file));
  const auto cfg = flags.config();
  const double v_eps = cfg.v_eps > 0.0 ? cfg.v_eps : params.default_v_eps();
  const double threshold = 10.0 * v_eps;

  auto density = [&](const std::vector<double>& xs) { return rmt::elliptical_density_grid(params, xs, cfg); };
  const auto grid = parse_grid(grid_text);
  const auto xs = grid ? grid_points(grid) : default_grid(density, params.support_bound(), threshold);
  const auto pts = density(xs);

  double max_residual = 0.0;
  double max_consistency = 0.0;
  for (double x : xs) {
    const auto r = rmt::elliptical_solve({x, v_eps}, params, cfg);
    max_residual = std::max(max_residual, r.residual);
    max_consistency = std::max(max_consistency, r.consistency_residual);
  }
  json s{{"theta", params.theta()},
         {"rho", params.rho()},
         {"xi", params.xi()},
         {"atom0_mass", params.atom_at_zero()},
         {"v_eps", v_eps},
         {"support_estimate", support_json(pts, threshold)},
         {"max_residual", max_residual},
         {"max_consistency_residual", max_consistency},
         {"grid", {xs.front(), xs.back(), xs.size()}}};
  write_output(out, density_csv(pts));
  if (!summary.empty()) write_output(summary, json_text(s));
  return kExitOk;
}

int cmd_edge(const std::string& h_file, double n_over_p, const std::string& out) {
  if (!(n_over_p > 0.0) || !std::isfinite(n_over_p)) throw rmt::InputError("--n-over-p must be positive");
  const auto h = rmt::io::read_measure_file(h_file);
  const auto e = rmt::edge(h, 1.0 / n_over_p);
  write_output(out, json_text({{"c0", e.c0}, {"mu", e.mu}, {"rho", e.rho}}));
  return kExitOk;
}

rmt::MatrixKind matrix_kind(const std::string& name) {
  if (name == "correlation") return rmt::MatrixKind::kCorrelation;
  if (name == "covariance") return rmt::MatrixKind::kCovariance;
  if (name == "scaled-gram") return rmt::MatrixKind::kScaledGram;
  throw rmt::InputError("unknown matrix kind '" + name + "'");
}

int cmd_simulate(const std::string& model_file, const std::string& kind, std::optional<std::uint64_t> seed_flag,
                 const std::string& out, const std::string& meta) {
  const auto mf = rmt::io::model_from_json(rmt::io::read_json_file(model_file));
  const rmt::Seed seed{seed_flag.value_or(mf.seed.value_or(0))};
  const auto spectrum = rmt::simulate_spectrum(mf.model, matrix_kind(kind), seed);

  std::ostringstream os;
  rmt::io::write_spectrum_csv(os, spectrum);
  write_output(out, os.str());

  const std::string meta_path = !meta.empty() ? meta : (out.empty() || out == "-" ? "" : out + ".json");
  if (!meta_path.empty()) {
    json m{{"model", rmt::io::model_to_json(mf.model)},
           {"seed", seed.value},
           {"matrix", kind},
           {"dims", {{"n", mf.model.n}, {"p", mf.model.p}, {"d", mf.model.row_dim()}}},
           {"count", spectrum.eigenvalues.size()}};
    write_output(meta_path, json_text(m));
  }
  return kExitOk;
}

json histogram_json(const rmt::Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
}

int cmd_diagnose(const std::string& model_file, const std::string& data_file, std::optional<std::uint64_t> seed_flag,
                 double angle_threshold, double norm_threshold, double trace_override, const std::string& out) {
  if (model_file.empty() == data_file.empty()) throw rmt::InputError("give exactly one of --model or --data");
  Eigen::MatrixXd y;
  double trace_over_p = 1.0;
  std::optional<rmt::SymMatrix> sigma;
  std::uint64_t seed_used = 0;
  if (!model_file.empty()) {
    const auto mf = rmt::io::model_from_json(rmt::io::read_json_file(model_file));
    seed_used = seed_flag.value_or(mf.seed.value_or(0));
    y = rmt::sample(mf.model, rmt::Seed{seed_used}).matrix();
    y.rowwise() -= rmt::population_mean(mf.model).transpose();
    sigma = rmt::population_covariance(mf.model);
    if (sigma) trace_over_p = sigma->matrix().trace() / static_cast<double>(sigma->dim());
  } else {
    y = rmt::io::read_matrix_csv(data_file);
    // Unknown mean: center by the column means.
    y.rowwise() -= y.colwise().mean();
  }
  if (trace_override > 0.0) trace_over_p = trace_override;
  if (y.rows() < 2) throw rmt::InputError("need at least two rows");

  const rmt::DataMatrix data(y);
  const auto norms = rmt::norm_diagnostic(data, trace_over_p);
  const auto angles = rmt::angle_diagnostic(data);
  const double diag = rmt::diagonal_diagnostic(rmt::sample_covariance(data), sigma);

  double vmax = 0.0;
  for (double v : norms.values) vmax = std::max(vmax, v);
  const auto norm_hist = rmt::make_histogram(norms.values, 0.0, std::max(2.0 * trace_over_p, vmax), 50);
  const bool concentrated = angles.max_offdiag <= angle_threshold && norms.max_deviation <= norm_threshold;

  json j{{"n", y.rows()},
         {"p", y.cols()},
         {"seed", seed_used},
         {"trace_sigma_over_p", trace_over_p},
         {"norm", {{"max_deviation", norms.max_deviation}, {"histogram", histogram_json(norm_hist)}}},
         {"angle",
          {{"max_offdiag", angles.max_offdiag},
           {"median", angles.median},
           {"histogram", histogram_json(angles.histogram)}}},
         {"diagonal_statistic", diag},
         {"thresholds", {{"angle", angle_threshold}, {"norm", norm_threshold}}},
         {"concentrated", concentrated ? "yes" : "no"}};
  write_output(out, json_text(j));
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::size_t reps, const std::string& out) {
  const auto report = rmt::verify_suite(suite, rmt::Seed{seed}, reps);
  write_output(out, json_text(rmt::io::report_to_json(report)));
  return report.passed ? kExitOk : kExitVerification;
}

int cmd_compare(const std::string& eigs_file, const std::string& law_file, const std::string& out) {
  const auto eigs = rmt::io::read_spectrum_csv(eigs_file);
  const auto pts = rmt::io::read_density_csv(law_file);
  const auto cdf = rmt::cdf_points(pts);
  json j{{"ks_distance", rmt::ks_distance(eigs, cdf)}, {"ecdf_count", eigs.eigenvalues.size()}};
  write_output(out, json_text(j));
  return kExitOk;
}

int cmd_experiment(const std::string& spec_file, std::optional<std::uint64_t> seed_flag, const std::string& out,
                   const std::string& eigs_out) {
  const json raw = rmt::io::read_json_file(spec_file);
  auto spec = rmt::io::experiment_from_json(raw);
  if (seed_flag) spec.seed = rmt::Seed{*seed_flag};
  const auto result = rmt::run_experiment(spec);
  json j = rmt::io::comparison_to_json(result);
  j["seed"] = spec.seed.value;
  write_output(out, json_text(j));
  if (!eigs_out.empty()) {
    std::ostringstream os;
    rmt::io::write_spectrum_csv(os, result.spectrum);
    write_output(eigs_out, os.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limiting spectral laws of sample covariance and correlation matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rmt 1.0.0");

  SolverFlags solver_flags;
  std::string out, summary, grid, h_file, params_file, model_file, data_file, matrix = "correlation", meta,
      suite, eigs_file, law_file, spec_file, eigs_out;
  double rho = 0.0, n_over_p = 0.0, angle_threshold = 0.2, norm_threshold = 0.35, trace_override = 0.0;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 0;

  auto* solve_mp = app.add_subcommand("solve-mp", "Density of the Marchenko-Pastur law");
  solve_mp->add_option("--h-file", h_file, "population spectral law (measure JSON)")->required();
  solve_mp->add_option("--rho", rho, "p / n")->required();
  solve_mp->add_option("--grid", grid, "min,max,count (default: around the detected support)");
  solve_mp->add_option("-o,--out", out, "density CSV (default stdout)");
  solve_mp->add_option("--summary", summary, "summary JSON");
  solver_flags.add_to(solve_mp);

  auto* solve_ell = app.add_subcommand("solve-elliptical", "Density of the elliptical-data law");
  solve_ell->add_option("--params", params_file, "parameter JSON")->required();
  solve_ell->add_option("--grid", grid, "min,max,count (default: around the detected support)");
  solve_ell->add_option("-o,--out", out, "density CSV (default stdout)");
  solve_ell->add_option("--summary", summary, "summary JSON");
  solver_flags.add_to(solve_ell);

  auto* edge = app.add_subcommand("edge", "Right edge of the limiting spectrum");
  edge->add_option("--h-file", h_file, "population spectral law (measure JSON)")->required();
  edge->add_option("--n-over-p", n_over_p, "n / p")->required();
  edge->add_option("-o,--out", out, "output JSON (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Eigenvalues of a simulated matrix");
  simulate->add_option("--model", model_file, "model JSON")->required();
  simulate->add_option("--matrix", matrix, "correlation | covariance | scaled-gram");
  simulate->add_option("--seed", seed, "root seed (default: model file, else 0)");
  simulate->add_option("-o,--out", out, "eigenvalue CSV (default stdout)");
  simulate->add_option("--meta", meta, "metadata JSON (default <out>.json)");

  auto* diagnose = app.add_subcommand("diagnose", "Norm, angle and diagonal diagnostics");
  diagnose->add_option("--model", model_file, "model JSON to simulate");
  diagnose->add_option("--data", data_file, "data matrix CSV (rows are observations)");
  diagnose->add_option("--seed", seed, "root seed (default: model file, else 0)");
  diagnose->add_option("--angle-threshold", angle_threshold, "max |r_i' r_j| / p");
  diagnose->add_option("--norm-threshold", norm_threshold, "max | ||r_i||^2 / p - trace(Sigma) / p |");
  diagnose->add_option("--trace-over-p", trace_override, "trace(Sigma) / p (default: model, else 1)");
  diagnose->add_option("-o,--out", out, "output JSON (default stdout)");

  auto* verify = app.add_subcommand("verify", "Concentration verification suites");
  verify->add_option("--suite", suite, "lemma6 | quadform | copula | tightness")
      ->required()
      ->check(CLI::IsMember({"lemma6", "quadform", "copula", "tightness"}));
  verify->add_option("--seed", seed, "root seed (default 0)");
  verify->add_option("--reps", reps, "replicates (default: per suite)");
  verify->add_option("-o,--out", out, "report JSON (default stdout)");

  auto* compare = app.add_subcommand("compare", "KS distance between a spectrum and a law");
  compare->add_option("--eigs", eigs_file, "eigenvalue CSV")->required();
  compare->add_option("--law", law_file, "density CSV with x,density,cdf")->required();
  compare->add_option("-o,--out", out, "output JSON (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "Simulate, solve and compare");
  experiment->add_option("--spec", spec_file, "experiment JSON")->required();
  experiment->add_option("--seed", seed, "root seed (overrides the spec)");
  experiment->add_option("-o,--out", out, "comparison JSON (default stdout)");
  experiment->add_option("--eigs-out", eigs_out, "eigenvalues of the first replicate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return kExitInput;
  }

  try {
    if (*solve_mp) return cmd_solve_mp(h_file, rho, grid, solver_flags, out, summary);
    if (*solve_ell) return cmd_solve_elliptical(params_file, grid, solver_flags, out, summary);
    if (*edge) return cmd_edge(h_file, n_over_p, out);
    if (*simulate) return cmd_simulate(model_file, matrix, seed, out, meta);
    if (*diagnose)
      return cmd_diagnose(model_file, data_file, seed, angle_threshold, norm_threshold, trace_override, out);
    if (*verify) return cmd_verify(suite, seed.value_or(0), reps, out);
    if (*compare) return cmd_compare(eigs_file, law_file, out);
    if (*experiment) return cmd_experiment(spec_file, seed, out, eigs_out);
  } catch (const rmt::InputError& e) {
    emit_error("input", e.what());
    return kExitInput;
  } catch (const rmt::NumericalError& e) {
    emit_error("numerical", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    emit_error("input", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    emit_error("numerical", e.what());
    return kExitNumerical;
  }
  return kExitInput;
}
