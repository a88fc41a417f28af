#include "rmt/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>

#include "rmt/parallel.hpp"

namespace rmt {

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Centered direction vectors r_i (rows) for the quadratic-form statistics.
Eigen::MatrixXd direction_rows(const PopulationModel& model, Seed seed) {
  if (model.family == Family::kSphereElliptical) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(model.n), static_cast<Eigen::Index>(model.p));
    parallel_for(model.n, [&](std::size_t i) {
      CounterRng rng(seed, StreamTag::kData, i);
      out.row(static_cast<Eigen::Index>(i)) = sample_sphere(model.p, rng).transpose();
    });
    return out;
  }
  const DataMatrix y = sample(model, seed);
  return y.matrix().rowwise() - population_mean(model).transpose();
}

PopulationModel gaussian_identity(std::size_t n, std::size_t p) {
  PopulationModel m;
  m.family = Family::kGaussian;
  m.n = n;
  m.p = p;
  m.d = p;
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw InputError("invalid histogram range");
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    double pos = std::floor((v - lo) / width);
    pos = std::clamp(pos, 0.0, static_cast<double>(bins - 1));
    ++h.counts[static_cast<std::size_t>(pos)];
  }
  return h;
}

ConcentrationReport combine_reports(const std::vector<ConcentrationReport>& parts) {
  ConcentrationReport out;
  if (parts.empty()) return out;
  out.statistic = parts.front().statistic;
  out.seed = parts.front().seed;
  for (const auto& part : parts) {
    out.dims.insert(out.dims.end(), part.dims.begin(), part.dims.end());
    out.failures.insert(out.failures.end(), part.failures.begin(), part.failures.end());
    out.passed = out.passed && part.passed;
  }
  return out;
}

Complex empirical_stieltjes(const Spectrum& eigs, Complex z) {
  if (z.imag() == 0.0) throw InputError("z must be off the real axis");
  Complex acc{0.0, 0.0};
  for (double l : eigs.eigenvalues) acc += 1.0 / (l - z);
  return acc / static_cast<double>(eigs.eigenvalues.size());
}

AzumaBound azuma_bound(double r, std::size_t p, std::size_t n, double v) {
  const double pd = static_cast<double>(p);
  const double raw = 4.0 * std::exp(-r * r * pd * pd * v * v / (16.0 * static_cast<double>(n)));
  return {raw, std::clamp(raw, 0.0, 1.0)};
}

ConcentrationReport stieltjes_concentration_mc(const PopulationModel& model, Complex z,
                                               std::size_t reps, Seed seed) {
  if (reps < 50) throw InputError("Stieltjes concentration needs at least 50 replicates");
  if (!(z.imag() > 0.0)) throw InputError("z must lie in the upper half-plane");
  model.validate();

  std::vector<Complex> values(reps);
  const double inv_n = 1.0 / static_cast<double>(model.n);
  parallel_for(reps, [&](std::size_t k) {
    const DataMatrix y = sample(model, seed.for_replicate(k));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(y.matrix().cols(), y.matrix().cols());
    m.selfadjointView<Eigen::Lower>().rankUpdate(y.matrix().transpose(), inv_n);
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    values[k] = empirical_stieltjes(sym_eigenvalues(SymMatrix(std::move(m))), z);
  });

  // Offset by the first value so that a constant sequence has an exact mean.
  Complex shift{0.0, 0.0};
  for (const auto& v : values) shift += v - values.front();
  const Complex mean = values.front() + shift / static_cast<double>(reps);
  std::vector<double> dev(reps);
  for (std::size_t k = 0; k < reps; ++k) dev[k] = std::abs(values[k] - mean);

  DimensionStats st;
  st.label = to_string(model.family);
  st.n = model.n;
  st.p = model.row_dim();
  st.reps = reps;
  st.mean_deviation = mean_of(dev);
  st.max_deviation = *std::max_element(dev.begin(), dev.end());
  double ss = 0.0;
  for (double d : dev) ss += d * d;
  st.sd = std::sqrt(ss / static_cast<double>(reps - 1));
  if (model.family == Family::kGaussian && st.p > 1)
    st.sigma_norm_over_log_p = operator_norm(model.shape_matrix()) / std::log(static_cast<double>(st.p));

  ConcentrationReport report;
  report.statistic = "stieltjes";
  report.seed = seed.value;
  const double v = z.imag();
  const double unit = std::sqrt(static_cast<double>(model.n)) / (static_cast<double>(st.p) * v);
  for (double factor : {0.5, 1.0, 2.0, 4.0}) {
    const double r = factor * unit;
    const auto count = std::count_if(dev.begin(), dev.end(), [&](double d) { return d > r; });
    const double freq = static_cast<double>(count) / static_cast<double>(reps);
    const AzumaBound b = azuma_bound(r, st.p, model.n, v);
    const double se = std::sqrt(b.clamped * (1.0 - b.clamped) / static_cast<double>(reps));
    st.thresholds.push_back(r);
    st.frequencies.push_back(freq);
    st.bounds.push_back(b.clamped);
    st.bounds_raw.push_back(b.raw);
    st.standard_errors.push_back(se);
    if (freq > b.clamped + 3.0 * se) {
      report.passed = false;
      report.failures.push_back("p=" + std::to_string(st.p) + " threshold " + fmt(r) +
                                ": frequency " + fmt(freq) + " exceeds bound " + fmt(b.clamped));
    }
  }
  report.dims.push_back(std::move(st));
  return report;
}

std::optional<SymMatrix> population_covariance(const PopulationModel& model) {
  switch (model.family) {
    case Family::kGaussian:
      return model.shape_matrix();
    case Family::kSphereElliptical:
      return SymMatrix::identity(model.p);
    case Family::kGaussianCopula:
      return copula_cov(model.shape_matrix());
    case Family::kBoundedIid: {
      const double var = model.bound * model.bound / 3.0;
      return SymMatrix::diagonal(std::vector<double>(model.p, var));
    }
    case Family::kLbBall:
      return std::nullopt;
  }
  return std::nullopt;
}

ConcentrationReport quadratic_form_deviation(const PopulationModel& model, const SymMatrix& m,
                                             std::size_t reps, Seed seed) {
  if (reps == 0) throw InputError("need at least one replicate");
  model.validate();
  const auto sigma = population_covariance(model);
  if (!sigma) throw InputError("no population covariance available");
  if (m.dim() != model.p) throw InputError("quadratic form matrix must be p x p");
  const double pd = static_cast<double>(model.p);
  const double centre = (m.matrix() * sigma->matrix()).trace() / pd;
  const bool is_zero = m.matrix().isZero(0.0);

  std::vector<double> worst(reps);
  parallel_for(reps, [&](std::size_t k) {
    if (is_zero) {
      worst[k] = 0.0;
      return;
    }
    const Eigen::MatrixXd r = direction_rows(model, seed.for_replicate(k));
    const Eigen::MatrixXd mr = r * m.matrix();
    const Eigen::VectorXd q = (mr.cwiseProduct(r)).rowwise().sum() / pd;
    worst[k] = (q.array() - centre).abs().maxCoeff();
  });

  DimensionStats st;
  st.label = to_string(model.family);
  st.n = model.n;
  st.p = model.p;
  st.reps = reps;
  st.mean_deviation = mean_of(worst);
  st.max_deviation = *std::max_element(worst.begin(), worst.end());
  double ss = 0.0;
  for (double w : worst) ss += (w - st.mean_deviation) * (w - st.mean_deviation);
  st.sd = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) : 0.0;
  if (model.p > 1) st.sigma_norm_over_log_p = operator_norm(*sigma) / std::log(pd);

  ConcentrationReport report;
  report.statistic = "quadform";
  report.seed = seed.value;
  report.dims.push_back(std::move(st));
  return report;
}

NormDiagnostic norm_diagnostic(const DataMatrix& y, double trace_sigma_over_p, bool center) {
  Eigen::MatrixXd r = y.matrix();
  if (center) r = r.rowwise() - r.colwise().mean();
  const double pd = static_cast<double>(r.cols());
  NormDiagnostic out;
  out.values.resize(static_cast<std::size_t>(r.rows()));
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const double v = r.row(i).squaredNorm() / pd;
    out.values[static_cast<std::size_t>(i)] = v;
    out.max_deviation = std::max(out.max_deviation, std::abs(v - trace_sigma_over_p));
  }
  return out;
}

AngleDiagnostic angle_diagnostic(const DataMatrix& y) {
  if (y.rows() < 2) throw InputError("angle diagnostic needs at least two rows");
  const Eigen::MatrixXd gram = y.matrix() * y.matrix().transpose() / static_cast<double>(y.cols());
  std::vector<double> pairs;
  pairs.reserve(y.rows() * (y.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) pairs.push_back(std::abs(gram(i, j)));
  AngleDiagnostic out;
  out.max_offdiag = *std::max_element(pairs.begin(), pairs.end());
  out.histogram = make_histogram(pairs, 0.0, 1.0, 50);
  auto mid = pairs.begin() + static_cast<std::ptrdiff_t>(pairs.size() / 2);
  std::nth_element(pairs.begin(), mid, pairs.end());
  out.median = *mid;
  return out;
}

double diagonal_diagnostic(const SymMatrix& s, const std::optional<SymMatrix>& sigma) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double scale = sigma ? (*sigma)(i, i) : 1.0;
    if (!(scale > 0.0)) throw InputError("population variance must be positive");
    worst = std::max(worst, std::abs(std::sqrt(std::max(0.0, s(i, i)) / scale) - 1.0));
  }
  return worst;
}

SymMatrix copula_cov(const SymMatrix& r) {
  const auto dim = static_cast<Eigen::Index>(r.dim());
  Eigen::MatrixXd out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double rij = r.matrix()(i, j);
      if (std::abs(rij) > 1.0) throw InputError("correlation entry outside [-1, 1]");
      // arcsin(1/2) = pi/6, so unit correlation gives exactly +-1/12.
      if (std::abs(rij) == 1.0) {
        out(i, j) = std::copysign(1.0 / 12.0, rij);
      } else {
        out(i, j) = std::asin(rij / 2.0) / (2.0 * std::numbers::pi);
      }
    }
  }
  return SymMatrix(std::move(out));
}

double copula_norm_bound(const SymMatrix& r) {
  const double norm = operator_norm(r);
  return (norm / 2.0 + 4.0 * norm * norm * (std::numbers::pi / 6.0 - 0.5)) / (2.0 * std::numbers::pi);
}

bool tightness_check(const Spectrum& eigs, double trace_sigma_over_p, double margin) {
  const double k = trace_sigma_over_p;
  const double level = 10.0 * (k + 1.0);
  const auto above = std::count_if(eigs.eigenvalues.begin(), eigs.eigenvalues.end(),
                                   [&](double l) { return l >= level; });
  const double fraction = static_cast<double>(above) / static_cast<double>(eigs.eigenvalues.size());
  return fraction <= (k + 1.0 + margin) / level;
}

namespace {

ConcentrationReport stieltjes_suite(Seed seed, std::size_t reps) {
  std::vector<ConcentrationReport> parts;
  for (std::size_t p : {50, 100, 200})
    parts.push_back(stieltjes_concentration_mc(gaussian_identity(p, p), Complex{0.0, 1.0}, reps, seed));
  ConcentrationReport report = combine_reports(parts);
  report.statistic = "lemma6";
  for (std::size_t k = 1; k < report.dims.size(); ++k) {
    if (!(report.dims[k].sd < report.dims[k - 1].sd)) {
      report.passed = false;
      report.failures.push_back("sd of m_p(i) did not decrease from p=" +
                                std::to_string(report.dims[k - 1].p) + " to p=" +
                                std::to_string(report.dims[k].p));
    }
  }
  return report;
}

constexpr double kZeroDeviation = 1e-12;

ConcentrationReport quadform_suite(Seed seed, std::size_t reps) {
  std::vector<ConcentrationReport> parts;
  bool ok = true;
  std::vector<std::string> failures;
  for (Family family : {Family::kGaussian, Family::kSphereElliptical, Family::kGaussianCopula}) {
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t p : {100, 200, 400}) {
      PopulationModel model = gaussian_identity(p, p);
      model.family = family;
      if (family == Family::kSphereElliptical) model.mixing = DiscreteMeasure::point_mass(1.0);
      if (family == Family::kGaussianCopula) model.shape = toeplitz_corr(p, 0.3).matrix();
      ConcentrationReport part = quadratic_form_deviation(model, SymMatrix::identity(p), reps, seed);
      const DimensionStats& st = part.dims.front();
      // Rounding-level slack: the sphere deviations are exact zeros up to
      // floating-point noise.
      if (st.mean_deviation > previous + kZeroDeviation) {
        ok = false;
        failures.push_back(to_string(family) + ": mean max-deviation increased at p=" + std::to_string(p));
      }
      if (family == Family::kSphereElliptical && st.max_deviation > kZeroDeviation) {
        ok = false;
        failures.push_back("sphere deviation is not zero at p=" + std::to_string(p));
      }
      previous = st.mean_deviation;
      parts.push_back(std::move(part));
    }
  }
  ConcentrationReport report = combine_reports(parts);
  report.passed = ok;
  report.failures = failures;
  return report;
}

// Random correlation matrix from a Gaussian factor model with k factors.
SymMatrix random_correlation(std::size_t p, std::size_t k, Seed seed) {
  const Eigen::MatrixXd a = sample_bounded_iid(p, k, 1.0, seed).matrix();
  Eigen::MatrixXd s = a * a.transpose();
  s.diagonal().array() += 0.05;
  return corr_from_cov(SymMatrix(std::move(s)));
}

ConcentrationReport copula_suite(Seed seed, std::size_t samples) {
  ConcentrationReport report;
  report.statistic = "copula";
  report.seed = seed.value;

  DimensionStats diag;
  diag.label = "copula_cov_identity_diagonal";
  diag.p = 50;
  const SymMatrix id_cov = copula_cov(SymMatrix::identity(50));
  for (std::size_t i = 0; i < 50; ++i)
    diag.max_deviation = std::max(diag.max_deviation, std::abs(id_cov(i, i) - 1.0 / 12.0));
  if (diag.max_deviation != 0.0) {
    report.passed = false;
    report.failures.push_back("copula_cov(Id) diagonal differs from 1/12");
  }
  report.dims.push_back(diag);

  DimensionStats bound;
  bound.label = "norm_bound_margin";
  bound.p = 50;
  bound.reps = 100;
  std::vector<double> margins(100);
  parallel_for(100, [&](std::size_t k) {
    const SymMatrix r = random_correlation(50, 1 + k % 25, seed.for_replicate(k));
    margins[k] = copula_norm_bound(r) - operator_norm(copula_cov(r));
  });
  bound.max_deviation = *std::min_element(margins.begin(), margins.end());
  bound.mean_deviation = mean_of(margins);
  if (bound.max_deviation < 0.0) {
    report.passed = false;
    report.failures.push_back("operator norm of copula_cov exceeded the bound");
  }
  report.dims.push_back(bound);

  DimensionStats mc;
  mc.label = "mc_covariance_z";
  mc.p = 4;
  mc.n = samples;
  const SymMatrix r = toeplitz_corr(4, 0.5);
  const Eigen::MatrixXd y = sample_gaussian_copula(samples, r, seed).matrix();
  const Eigen::MatrixXd c = y.rowwise() - y.colwise().mean();
  const SymMatrix target = copula_cov(r);
  const double nd = static_cast<double>(samples);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = i; j < 4; ++j) {
      const Eigen::ArrayXd prod = c.col(i).array() * c.col(j).array();
      const double est = prod.sum() / (nd - 1.0);
      const double var = (prod - prod.mean()).square().sum() / (nd - 1.0);
      const double z = std::abs(est - target.matrix()(i, j)) / std::sqrt(var / nd);
      mc.max_deviation = std::max(mc.max_deviation, z);
    }
  }
  if (mc.max_deviation > 5.0) {
    report.passed = false;
    report.failures.push_back("Monte Carlo copula covariance differs by " + fmt(mc.max_deviation) +
                              " standard errors");
  }
  report.dims.push_back(mc);
  return report;
}

ConcentrationReport tightness_suite(Seed seed, std::size_t reps) {
  ConcentrationReport report;
  report.statistic = "tightness";
  report.seed = seed.value;
  DimensionStats st;
  st.label = "gaussian";
  st.n = 200;
  st.p = 200;
  st.reps = reps;
  std::vector<double> tops(reps);
  std::vector<char> ok(reps);
  parallel_for(reps, [&](std::size_t k) {
    const DataMatrix y = sample_gaussian(200, SymMatrix::identity(200), seed.for_replicate(k));
    const Spectrum s = sym_eigenvalues(SymMatrix(y.matrix().transpose() * y.matrix() / 200.0));
    tops[k] = s.max();
    ok[k] = tightness_check(s, 1.0, 0.0);
  });
  st.max_deviation = *std::max_element(tops.begin(), tops.end());
  st.mean_deviation = mean_of(tops);
  for (std::size_t k = 0; k < reps; ++k) {
    if (!ok[k]) {
      report.passed = false;
      report.failures.push_back("tightness bound violated in replicate " + std::to_string(k));
    }
  }
  report.dims.push_back(st);
  return report;
}

}  // namespace

ConcentrationReport verify_suite(const std::string& suite, Seed seed, std::size_t reps) {
  if (suite == "lemma6") return stieltjes_suite(seed, reps == 0 ? 200 : reps);
  if (suite == "quadform") return quadform_suite(seed, reps == 0 ? 20 : reps);
  if (suite == "copula") return copula_suite(seed, reps == 0 ? 100000 : reps);
  if (suite == "tightness") return tightness_suite(seed, reps == 0 ? 20 : reps);
  throw InputError("unknown suite '" + suite + "'");
}

}  // namespace rmt
