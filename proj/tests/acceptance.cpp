// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
// usage: acceptance <path-to-rmt-cli> <scratch-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "rmt/concentration.hpp"
#include "rmt/elliptical_solver.hpp"
#include "rmt/experiments.hpp"
#include "rmt/linalg.hpp"
#include "rmt/mp_solver.hpp"
#include "rmt/samplers.hpp"

namespace fs = std::filesystem;
using namespace rmt;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const DiscreteMeasure kDelta1 = DiscreteMeasure::point_mass(1.0);

double null_density(double x, double rho) {
  const double a = std::pow(1.0 - std::sqrt(rho), 2);
  const double b = std::pow(1.0 + std::sqrt(rho), 2);
  if (x <= a || x >= b) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * rho * x);
}

ExperimentSpec gaussian_spec(std::size_t n, std::size_t p, std::uint64_t seed) {
  ExperimentSpec s;
  s.model.family = Family::kGaussian;
  s.model.n = n;
  s.model.p = p;
  s.seed = Seed{seed};
  return s;
}

ExperimentSpec mixture_spec(std::uint64_t seed) {
  ExperimentSpec s;
  s.law = Law::kElliptical;
  s.model.family = Family::kSphereElliptical;
  s.model.n = 600;
  s.model.p = 300;
  s.model.d = 300;
  s.model.mixing = DiscreteMeasure({{1, 0.5}, {2, 0.5}});
  s.seed = Seed{seed};
  return s;
}

// 20 points of the upper half-plane, from near the real axis to far away.
std::vector<Complex> plane_grid() {
  std::vector<Complex> zs;
  for (double x : {-1.0, 0.3, 1.0, 2.0, 4.0})
    for (double y : {1e-3, 0.1, 1.0, 10.0}) zs.emplace_back(x, y);
  return zs;
}

// Density grids used by criterion 5.
struct NullGrid {
  double rho;
  std::vector<double> interior;
  std::vector<double> full;
};

std::vector<NullGrid> null_grids() {
  std::vector<NullGrid> out;
  for (double rho : {0.25, 0.5, 2.0}) {
    const double a = std::pow(1.0 - std::sqrt(rho), 2);
    const double b = std::pow(1.0 + std::sqrt(rho), 2);
    // "Interior": the central 80% of the support, clear of the square-root
    // edges where Stieltjes smoothing bias is O(sqrt(v)) rather than O(v).
    const double margin = 0.1 * (b - a);
    out.push_back({rho, linspace(a + margin, b - margin, 50), linspace(0.0, b + 1.0, 2000)});
  }
  return out;
}

Outcome criterion1() {
  const char* old = std::getenv("RMT_THREADS");
  const std::string saved = old ? old : "";
  setenv("RMT_THREADS", "1", 1);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment(gaussian_spec(1000, 500, 1));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (old) {
    setenv("RMT_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("RMT_THREADS");
  }
  return {r.ks_distance <= 0.05 && secs <= 60.0,
          "ks=" + fmt("%.4f", r.ks_distance) + " (<= 0.05), runtime " + fmt("%.2f", secs) + "s single-threaded (<= 60)"};
}

Outcome criterion2() {
  auto spec = gaussian_spec(800, 400, 1);
  spec.model.shape = toeplitz_corr(400, 0.5).matrix();
  spec.model.toeplitz_r = 0.5;
  spec.h_source = HSource::kEmpirical;
  const auto r = run_experiment(spec);
  const double diag = r.diagonal_statistic.value();
  return {r.ks_distance <= 0.06 && diag <= 0.05,
          "ks=" + fmt("%.4f", r.ks_distance) + " (<= 0.06), max|sqrt(S_ii)-1|=" + fmt("%.4f", diag) + " (<= 0.05)"};
}

Outcome criterion3() {
  PopulationModel m;
  m.family = Family::kGaussian;
  m.n = 400;
  m.p = 200;
  m.shape = toeplitz_corr(200, 0.5).matrix();
  const Eigen::MatrixXd y = sample(m, Seed{3}).matrix();
  Eigen::VectorXd d(200);
  for (Eigen::Index j = 0; j < d.size(); ++j) d(j) = std::exp(std::sin(0.37 * static_cast<double>(j)) * 3.0);
  const auto a = sym_eigenvalues(sample_correlation(DataMatrix(y))).eigenvalues;
  const auto b = sym_eigenvalues(sample_correlation(DataMatrix(y * d.asDiagonal()))).eigenvalues;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return {worst <= 1e-10, "max eigenvalue change " + fmt("%.3g", worst) + " (<= 1e-10), column scales in [e^-3, e^3]"};
}

Outcome criterion4() {
  const auto e = edge(kDelta1, 0.25);
  const bool exact = std::abs(e.c0 - 2.0 / 3.0) <= 1e-10 && std::abs(e.mu - 2.25) <= 1e-10;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto spectrum = simulate_spectrum(gaussian_spec(1000, 250, seed).model, MatrixKind::kCorrelation, Seed{seed});
    worst = std::max(worst, std::abs(spectrum.max() / e.mu - 1.0));
  }
  return {exact && worst <= 0.05, "c0=" + fmt("%.15f", e.c0) + " mu=" + fmt("%.15f", e.mu) +
                                      ", worst relative gap of the top eigenvalue over 10 seeds " + fmt("%.4f", worst) +
                                      " (<= 0.05)"};
}

Outcome criterion5() {
  bool ok = true;
  std::ostringstream detail;
  for (const auto& g : null_grids()) {
    const double v = mp_default_v_eps(kDelta1, g.rho);
    const auto pts = density_grid(kDelta1, g.rho, g.interior);
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, std::abs(p.density - null_density(p.x, g.rho)));
    const double mass = density_grid(kDelta1, g.rho, g.full).back().cdf;
    ok = ok && worst <= 5 * v && std::abs(mass - 1.0) <= 0.02;
    detail << "rho=" << g.rho << ": err/v_eps=" << fmt("%.2f", worst / v) << " mass=" << fmt("%.4f", mass) << "; ";
  }
  return {ok, detail.str() + "(err <= 5 v_eps, |mass-1| <= 0.02)"};
}

Outcome criterion6() {
  double w_gap = 0.0, m_gap = 0.0, raw_gap = 0.0, identity = 0.0;
  struct Case {
    DiscreteMeasure h;
    double rho;
  };
  const std::vector<Case> cases{{kDelta1, 1.0}, {kDelta1, 0.5}, {kDelta1, 2.0}, {DiscreteMeasure({{0.5, 0.5}, {2, 0.5}}), 0.7}};
  for (const auto& c : cases) {
    const EllipticalParams params(c.h, kDelta1, 1.0, c.rho, c.rho);
    for (Complex z : plane_grid()) {
      const auto ell = elliptical_solve(z, params);
      const auto mp = mp_companion_solve(z, c.h, c.rho);
      w_gap = std::max(w_gap, std::abs(reduced_companion(ell) - mp.w));
      m_gap = std::max(m_gap, std::abs(ell.m - mp.m));
      if (c.rho == 1.0 && c.h.size() == 1) raw_gap = std::max(raw_gap, std::abs(ell.w - mp.w));
      identity = std::max(identity, std::abs(1.0 + z * ell.m - ell.w * ell.b));
    }
  }
  return {w_gap <= 1e-8 && m_gap <= 1e-8 && raw_gap <= 1e-8 && identity <= 1e-10,
          "companion w gap " + fmt("%.2g", w_gap) + ", m gap " + fmt("%.2g", m_gap) + ", solver-w gap at rho=1 " +
              fmt("%.2g", raw_gap) + " (<= 1e-8); |1+zm-wb| " + fmt("%.2g", identity) + " (<= 1e-10)"};
}

Outcome criterion7() {
  const auto a = run_experiment(mixture_spec(1));

  ExperimentSpec cop;
  cop.law = Law::kElliptical;
  cop.model.family = Family::kGaussianCopula;
  cop.model.n = 600;
  cop.model.p = 200;
  cop.model.shape = toeplitz_corr(200, 0.3).matrix();
  cop.model.toeplitz_r = 0.3;
  cop.seed = Seed{1};
  const auto b = run_experiment(cop);

  auto shifted = mixture_spec(1);
  shifted.model.location = Eigen::VectorXd::Constant(300, 1.0);
  const auto c = run_experiment(shifted);
  const double change = std::abs(c.ks_distance - a.ks_distance);

  return {a.ks_distance <= 0.07 && b.ks_distance <= 0.07 && change <= 0.02,
          "(a) ks=" + fmt("%.4f", a.ks_distance) + " (b) ks=" + fmt("%.4f", b.ks_distance) +
              " (<= 0.07); (c) mean shift changes ks by " + fmt("%.4f", change) + " (<= 0.02)"};
}

Outcome criterion8() {
  double worst = 0.0;
  const Complex alt{0.0, 1.0};
  for (const auto& g : null_grids()) {
    const double v = mp_default_v_eps(kDelta1, g.rho);
    for (const auto* xs : {&g.interior, &g.full})
      for (double x : *xs) {
        const Complex z{x, v};
        worst = std::max(worst, std::abs(mp_companion_solve(z, kDelta1, g.rho).w -
                                         mp_companion_solve(z, kDelta1, g.rho, {}, alt).w));
      }
  }
  for (Complex z : plane_grid()) {
    for (double rho : {0.5, 1.0, 2.0}) {
      const EllipticalParams params(kDelta1, kDelta1, 1.0, rho);
      worst = std::max(worst, std::abs(elliptical_solve(z, params).w - elliptical_solve(z, params, {}, alt).w));
      worst = std::max(worst, std::abs(mp_companion_solve(z, kDelta1, rho).w -
                                       mp_companion_solve(z, kDelta1, rho, {}, alt).w));
    }
  }
  // The grid of the elliptical mixture law in criterion 7.
  const auto params = elliptical_population_params(mixture_spec(1).model, HSource::kEmpirical);
  const double v = params.default_v_eps();
  for (double x : linspace(0.0, 1.25 * params.support_bound() + 0.5, 1200)) {
    const Complex z{x, v};
    worst = std::max(worst, std::abs(elliptical_solve(z, params).w - elliptical_solve(z, params, {}, alt).w));
  }
  return {worst <= 1e-8, "largest gap between starts -1/z and i: " + fmt("%.2g", worst) + " (<= 1e-8)"};
}

Outcome suite_outcome(const std::string& name) {
  const auto r = verify_suite(name, Seed{0});
  std::string detail = r.passed ? "all bounds hold" : "";
  for (const auto& f : r.failures) detail += f + "; ";
  return {r.passed, detail};
}

Outcome criterion11() {
  PopulationModel m;
  m.family = Family::kGaussian;
  m.n = 400;
  m.p = 400;
  int angle_ok = 0, norm_ok = 0;
  double angle_max = 0.0, norm_max = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DataMatrix y = sample(m, Seed{seed});
    const auto a = angle_diagnostic(y);
    const auto nd = norm_diagnostic(y, 1.0);
    angle_ok += a.max_offdiag <= 0.2;
    norm_ok += nd.max_deviation <= 0.35;
    angle_max = std::max(angle_max, a.max_offdiag);
    norm_max = std::max(norm_max, nd.max_deviation);
  }
  const bool ok = angle_ok >= 0.99 * 50 && norm_ok >= 0.99 * 50;
  return {ok, "angle <= 0.2 in " + std::to_string(angle_ok) + "/50 (largest " + fmt("%.4f", angle_max) +
                  "), norm deviation <= 0.35 in " + std::to_string(norm_ok) + "/50 (largest " + fmt("%.4f", norm_max) +
                  "); need >= 99%"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

Outcome criterion13(const std::string& cli, const fs::path& work) {
  fs::create_directories(work);
  write_text(work / "delta1.json", R"({"atoms":[{"value":1,"weight":1}]})");
  write_text(work / "mix.json", R"({"atoms":[{"value":0.5,"weight":0.3},{"value":1,"weight":0.4},{"value":3,"weight":0.3}]})");
  write_text(work / "params.json", R"({"H":{"atoms":[{"value":1,"weight":1}]},"nu":{"atoms":[{"value":1,"weight":0.5},{"value":2,"weight":0.5}]},"theta":1,"rho":0.5})");
  write_text(work / "model.json", R"({"family":"gaussian","n":300,"p":120,"shape":{"kind":"toeplitz","r":0.5}})");
  write_text(work / "ell_model.json", R"({"family":"sphere_elliptical","n":200,"p":100,"d":100,"mixing":{"atoms":[{"value":1,"weight":0.5},{"value":2,"weight":0.5}]}})");
  write_text(work / "experiment.json", R"({"model":{"family":"gaussian","n":300,"p":100},"law":"mp","replicates":3,"seed":4})");

  // Every command writes its outputs into the directory given as $D.
  const std::vector<std::string> commands{
      "solve-mp --h-file W/delta1.json --rho 0.5 --grid 0,8,800 -o $D/a.csv --summary $D/a.json",
      "solve-mp --h-file W/mix.json --rho 2 -o $D/b.csv --summary $D/b.json",
      "solve-elliptical --params W/params.json -o $D/c.csv --summary $D/c.json",
      "edge --h-file W/mix.json --n-over-p 4 -o $D/d.json",
      "simulate --model W/model.json --seed 7 -o $D/e.csv",
      "simulate --model W/ell_model.json --matrix scaled-gram --seed 7 -o $D/f.csv",
      "diagnose --model W/model.json --seed 7 -o $D/g.json",
      "verify --suite copula --seed 3 -o $D/h.json",
      "verify --suite tightness --seed 3 -o $D/i.json",
      "compare --eigs $D/e.csv --law $D/a.csv -o $D/j.json",
      "experiment --spec W/experiment.json -o $D/k.json --eigs-out $D/k.csv",
  };
  std::vector<std::string> mismatches;
  std::vector<std::vector<std::string>> runs;
  int failures = 0;
  for (const char* threads : {"1", "1", "4", "3"}) {
    const fs::path dir = work / ("run" + std::to_string(runs.size()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (std::string c : commands) {
      for (std::size_t pos; (pos = c.find("$D")) != std::string::npos;) c.replace(pos, 2, dir.string());
      for (std::size_t pos; (pos = c.find("W/")) != std::string::npos;) c.replace(pos, 2, work.string() + "/");
      const std::string full = "RMT_THREADS=" + std::string(threads) + " '" + cli + "' " + c + " > '" +
                               (dir / "stdout").string() + "' 2>&1";
      if (std::system(full.c_str()) != 0) ++failures;
    }
    for (const auto& entry : fs::directory_iterator(dir)) outputs.push_back(entry.path().filename().string());
    std::sort(outputs.begin(), outputs.end());
    std::vector<std::string> contents;
    for (const auto& name : outputs) contents.push_back(name + "\n" + slurp(dir / name));
    runs.push_back(contents);
  }
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r] != runs[0]) mismatches.push_back("run " + std::to_string(r));
  const std::size_t files = runs[0].size();
  return {failures == 0 && mismatches.empty() && files >= 16,
          std::to_string(commands.size()) + " commands x 4 runs (RMT_THREADS=1,1,4,3), " + std::to_string(files) +
              " files compared; command failures " + std::to_string(failures) + ", differing runs " +
              std::to_string(mismatches.size())};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <rmt-cli> <scratch-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, criterion5},
      {6, criterion6},
      {7, criterion7},
      {8, criterion8},
      {9, [] { return suite_outcome("lemma6"); }},
      {10, [] { return suite_outcome("quadform"); }},
      {11, criterion11},
      {12, [] { return suite_outcome("copula"); }},
      {13, [&] { return criterion13(cli, work); }},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
