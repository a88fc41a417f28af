#include "rmt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rmt/concentration.hpp"
#include "rmt/parallel.hpp"

namespace rmt {

namespace {

constexpr std::size_t kDefaultGridPoints = 1200;

double interpolate(std::span<const CdfPoint> cdf, double x) {
  if (x <= cdf.front().first) return cdf.front().second;
  if (x >= cdf.back().first) return cdf.back().second;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x,
                                   [](double v, const CdfPoint& p) { return v < p.first; });
  const CdfPoint& hi = *it;
  const CdfPoint& lo = *(it - 1);
  const double t = (x - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

DataMatrix rescale_columns(const DataMatrix& y, std::span<const double> scale) {
  if (scale.empty()) return y;
  if (scale.size() != y.cols()) throw InputError("column scale has wrong length");
  Eigen::VectorXd d(static_cast<Eigen::Index>(scale.size()));
  for (std::size_t j = 0; j < scale.size(); ++j) {
    if (!(scale[j] > 0.0)) throw InputError("column scale entries must be positive");
    d(static_cast<Eigen::Index>(j)) = scale[j];
  }
  return DataMatrix(y.matrix() * d.asDiagonal());
}

std::vector<double> default_grid(double bound, double lo, std::size_t count) {
  return linspace(lo, 1.25 * bound + 0.5, count);
}

std::vector<double> grid_for(const std::optional<GridSpec>& spec, double bound) {
  if (!spec) return default_grid(bound, 0.0, kDefaultGridPoints);
  if (spec->count < 2 || !(spec->hi > spec->lo)) throw InputError("invalid grid specification");
  return linspace(spec->lo, spec->hi, spec->count);
}

// The law's grid covers its support; finite-rank outliers (a mean shift)
// may sit beyond it, where F is already flat.
double compare(const Spectrum& s, std::vector<CdfPoint> cdf, double atom, double v_eps) {
  if (s.max() > cdf.back().first) cdf.emplace_back(s.max() + 1.0, cdf.back().second);
  if (atom > 0.0) return ks_distance_above(s, cdf, 10.0 * v_eps);
  return ks_distance(s, cdf);
}

void summarize(ComparisonResult& out, std::vector<Spectrum>& spectra, const std::vector<double>& ks) {
  out.ks_per_replicate = ks;
  out.ks_distance = std::accumulate(ks.begin(), ks.end(), 0.0) / static_cast<double>(ks.size());
  for (const auto& s : spectra) out.largest_per_replicate.push_back(s.max());
  out.spectrum = std::move(spectra.front());
  out.ecdf_count = out.spectrum.eigenvalues.size();
  out.empirical_min = out.spectrum.min();
  out.empirical_max = out.spectrum.max();
  out.largest_eigenvalue = out.spectrum.max();
}

}  // namespace

std::vector<CdfPoint> cdf_points(std::span<const DensityPoint> pts) {
  std::vector<CdfPoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.x, p.cdf);
  return out;
}

double ks_distance(const Spectrum& eigs, std::span<const CdfPoint> cdf) {
  if (cdf.empty()) throw InputError("empty CDF grid");
  if (eigs.eigenvalues.empty()) throw InputError("empty spectrum");
  const double x0 = cdf.front().first;
  const double xn = cdf.back().first;
  const double slack = 1e-9 * std::max({1.0, std::abs(x0), std::abs(xn)});
  const std::vector<double>& e = eigs.eigenvalues;
  if (e.front() < x0 - slack || e.back() > xn + slack) {
    std::ostringstream msg;
    msg << "CDF grid [" << x0 << ", " << xn << "] does not cover the spectrum [" << e.front()
        << ", " << e.back() << "]";
    throw InputError(msg.str());
  }
  const double n = static_cast<double>(e.size());
  double sup = 0.0;
  std::size_t i = 0;
  while (i < e.size()) {
    std::size_t j = i;
    while (j < e.size() && e[j] == e[i]) ++j;
    const double x = std::clamp(e[i], x0, xn);
    const double fx = interpolate(cdf, x);
    const double fleft = x <= x0 ? 0.0 : fx;
    sup = std::max({sup, std::abs(fx - static_cast<double>(j) / n),
                    std::abs(fleft - static_cast<double>(i) / n)});
    i = j;
  }
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    const auto [x, f] = cdf[k];
    const auto below = std::lower_bound(e.begin(), e.end(), x) - e.begin();
    const auto upto = std::upper_bound(e.begin(), e.end(), x) - e.begin();
    sup = std::max(sup, std::abs(f - static_cast<double>(upto) / n));
    if (k > 0) sup = std::max(sup, std::abs(f - static_cast<double>(below) / n));
  }
  return std::min(sup, 1.0);
}

double ks_distance_above(const Spectrum& eigs, std::span<const CdfPoint> cdf, double threshold) {
  Spectrum upper;
  for (double l : eigs.eigenvalues)
    if (l > threshold) upper.eigenvalues.push_back(l);
  upper.source_dim = upper.eigenvalues.size();
  if (upper.eigenvalues.empty()) throw InputError("no eigenvalues above the atom threshold");
  const double base = interpolate(cdf, threshold);
  if (!(base < 1.0)) throw InputError("no continuous mass above the atom threshold");
  std::vector<CdfPoint> conditional{{threshold, 0.0}};
  for (const auto& [x, f] : cdf)
    if (x > threshold) conditional.emplace_back(x, std::max(0.0, (f - base) / (1.0 - base)));
  return ks_distance(upper, conditional);
}

DiscreteMeasure toeplitz_symbol_law(double r, std::size_t atoms) {
  if (!(std::abs(r) < 1.0)) throw InputError("toeplitz parameter must satisfy |r| < 1");
  const auto symbol = [r](double w) { return (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(w) + r * r); };
  // The symbol is monotone in w on [0, pi]: decreasing for r > 0.
  return DiscreteMeasure::from_quantiles(
      [&](double q) { return symbol(std::numbers::pi * (r >= 0.0 ? 1.0 - q : q)); }, atoms);
}

DiscreteMeasure correlation_population_law(const PopulationModel& model, HSource source) {
  if (source == HSource::kAnalytic) {
    if (model.shape.size() == 0) return DiscreteMeasure::point_mass(1.0);
    if (model.toeplitz_r) return toeplitz_symbol_law(*model.toeplitz_r);
    throw InputError("no analytic spectral law for this shape");
  }
  const SymMatrix gamma = corr_from_cov(model.shape_matrix());
  return DiscreteMeasure::from_eigenvalues(sym_eigenvalues(gamma).eigenvalues);
}

EllipticalParams elliptical_population_params(const PopulationModel& model, HSource source) {
  model.validate();
  const double p = static_cast<double>(model.p);
  const double n = static_cast<double>(model.n);
  const double rho = p / n;
  switch (model.family) {
    case Family::kSphereElliptical: {
      const double theta = static_cast<double>(model.d) / p;
      DiscreteMeasure nu = model.mixing_schedule.empty()
                               ? model.mixing.value_or(DiscreteMeasure::point_mass(1.0))
                               : DiscreteMeasure::from_eigenvalues(model.mixing_schedule);
      DiscreteMeasure h = [&] {
        if (model.shape.size() == 0) return DiscreteMeasure::point_mass(1.0);
        if (source == HSource::kAnalytic) throw InputError("no analytic spectral law for this Gamma");
        const SymMatrix t(model.shape * model.shape.transpose());
        return DiscreteMeasure::from_eigenvalues(sym_eigenvalues(t).eigenvalues);
      }();
      return EllipticalParams(std::move(h), std::move(nu), theta, rho);
    }
    case Family::kGaussianCopula:
    case Family::kGaussian:
    case Family::kBoundedIid: {
      if (source == HSource::kAnalytic && model.family == Family::kGaussian && model.shape.size() == 0)
        return EllipticalParams(DiscreteMeasure::point_mass(1.0), DiscreteMeasure::point_mass(1.0), 1.0, rho);
      if (source == HSource::kAnalytic) throw InputError("no analytic spectral law for this model");
      const SymMatrix t = *population_covariance(model);
      return EllipticalParams(DiscreteMeasure::from_eigenvalues(sym_eigenvalues(t).eigenvalues),
                              DiscreteMeasure::point_mass(1.0), 1.0, rho);
    }
    case Family::kLbBall:
      break;
  }
  throw InputError("family '" + to_string(model.family) + "' has no elliptical population law");
}

Spectrum simulate_spectrum(const PopulationModel& model, MatrixKind kind, Seed seed,
                           std::span<const double> column_scale) {
  const DataMatrix y = rescale_columns(sample(model, seed), column_scale);
  switch (kind) {
    case MatrixKind::kCorrelation: return sym_eigenvalues(sample_correlation(y));
    case MatrixKind::kCovariance: return sym_eigenvalues(sample_covariance(y));
    case MatrixKind::kScaledGram:
      return sym_eigenvalues(scaled_gram(y, model.row_dim(), model.p, model.n));
  }
  throw InputError("unknown matrix kind");
}

ComparisonResult run_correlation_experiment(const ExperimentSpec& spec) {
  if (spec.law != Law::kMp) throw InputError("correlation experiment requires the mp law");
  if (spec.model.family != Family::kGaussian)
    throw InputError("mp law requires a gaussian (X Sigma^{1/2}) model");
  if (spec.replicates == 0) throw InputError("need at least one replicate");
  spec.model.validate();

  const DiscreteMeasure h = correlation_population_law(spec.model, spec.h_source);
  const double rho = static_cast<double>(spec.model.p) / static_cast<double>(spec.model.n);
  const std::vector<double> xs = grid_for(spec.grid, mp_support_bound(h, rho));
  const std::vector<DensityPoint> law = density_grid(h, rho, xs, spec.solver);
  const std::vector<CdfPoint> cdf = cdf_points(law);
  const double v_eps = spec.solver.v_eps > 0.0 ? spec.solver.v_eps : mp_default_v_eps(h, rho);

  ComparisonResult out;
  out.theoretical_support = support_from_density(law, 10.0 * v_eps);
  std::vector<Spectrum> spectra(spec.replicates);
  std::vector<double> ks(spec.replicates);
  const SymMatrix sigma = spec.model.shape_matrix();
  parallel_for(spec.replicates, [&](std::size_t k) {
    const DataMatrix y = rescale_columns(sample(spec.model, spec.seed.for_replicate(k)), spec.column_scale);
    spectra[k] = sym_eigenvalues(sample_correlation(y));
    ks[k] = compare(spectra[k], cdf, mp_atom_at_zero(rho), v_eps);
    if (k == 0) {
      std::optional<SymMatrix> scale = sigma;
      if (!spec.column_scale.empty()) {
        Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(spec.column_scale.data(),
                                                              static_cast<Eigen::Index>(spec.column_scale.size()));
        scale = SymMatrix(d.asDiagonal() * sigma.matrix() * d.asDiagonal());
      }
      out.diagonal_statistic = diagonal_diagnostic(sample_covariance(y), scale);
    }
  });
  if (spec.predict_edge) out.edge_prediction = edge(h, rho).mu;
  summarize(out, spectra, ks);
  return out;
}

ComparisonResult run_elliptical_experiment(const ExperimentSpec& spec) {
  if (spec.law != Law::kElliptical) throw InputError("elliptical experiment requires the elliptical law");
  if (spec.replicates == 0) throw InputError("need at least one replicate");
  const EllipticalParams params = elliptical_population_params(spec.model, spec.h_source);
  const std::vector<double> xs = grid_for(spec.grid, params.support_bound());
  const std::vector<DensityPoint> law = elliptical_density_grid(params, xs, spec.solver);
  const std::vector<CdfPoint> cdf = cdf_points(law);
  const double v_eps = spec.solver.v_eps > 0.0 ? spec.solver.v_eps : params.default_v_eps();

  ComparisonResult out;
  out.theoretical_support = support_from_density(law, 10.0 * v_eps);
  std::vector<Spectrum> spectra(spec.replicates);
  std::vector<double> ks(spec.replicates);
  parallel_for(spec.replicates, [&](std::size_t k) {
    spectra[k] = simulate_spectrum(spec.model, MatrixKind::kScaledGram, spec.seed.for_replicate(k),
                                   spec.column_scale);
    ks[k] = compare(spectra[k], cdf, params.atom_at_zero(), v_eps);
  });
  summarize(out, spectra, ks);
  return out;
}

ComparisonResult run_experiment(const ExperimentSpec& spec) {
  return spec.law == Law::kMp ? run_correlation_experiment(spec) : run_elliptical_experiment(spec);
}

}  // namespace rmt
