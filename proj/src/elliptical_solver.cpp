#include "rmt/elliptical_solver.hpp"

#include <algorithm>
#include <cmath>

namespace rmt {

namespace {

struct MixingValue {
  Complex b;
  Complex db;
};

MixingValue mixing_with_derivative(Complex w, const DiscreteMeasure& nu, double theta, double xi) {
  MixingValue out{{0.0, 0.0}, {0.0, 0.0}};
  for (const auto& a : nu.atoms()) {
    const double l2 = a.value * a.value;
    const Complex inv = 1.0 / (1.0 + xi * l2 * w);
    if (!is_finite(inv)) throw NumericalError("singular integrand");
    out.b += a.weight * theta * l2 * inv;
    out.db -= a.weight * theta * xi * l2 * l2 * inv * inv;
  }
  return out;
}

MapValue elliptical_map(Complex z, Complex w, const EllipticalParams& p) {
  const MixingValue mv = mixing_with_derivative(w, p.nu(), p.theta(), p.xi());
  Complex value{0.0, 0.0};
  Complex second{0.0, 0.0};
  for (const auto& a : p.h().atoms()) {
    const Complex inv = 1.0 / (a.value * mv.b - z);
    if (!is_finite(inv)) throw NumericalError("singular integrand");
    value += a.weight * a.value * inv;
    second += a.weight * a.value * a.value * inv * inv;
  }
  return {value, -mv.db * second};
}

}  // namespace

EllipticalParams::EllipticalParams(DiscreteMeasure h, DiscreteMeasure nu, double theta, double rho,
                                   std::optional<double> xi)
    : h_(std::move(h)), nu_(std::move(nu)), theta_(theta), rho_(rho), xi_(theta * theta * rho) {
  if (!(theta_ > 0.0) || !std::isfinite(theta_)) throw InputError("theta must be positive");
  if (!(rho_ > 0.0) || !std::isfinite(rho_)) throw InputError("rho must be positive");
  if (xi && std::abs(*xi - xi_) > 1e-12 * xi_)
    throw InputError("xi is inconsistent with theta^2 * rho");
  if (h_.min_value() < 0.0) throw InputError("H must be supported on [0, inf)");
  if (h_.is_zero()) throw InputError("H must not be the point mass at zero");
  if (nu_.is_zero()) throw InputError("nu must not be the point mass at zero");
  if (h_.mean() > kMomentGuard)
    throw InputError("first moment of H exceeds the moment guard");
}

double EllipticalParams::atom_at_zero() const noexcept {
  return std::max(0.0, 1.0 - 1.0 / (theta_ * rho_));
}

double EllipticalParams::default_v_eps() const {
  const double lmax = std::max(std::abs(nu_.min_value()), std::abs(nu_.max_value()));
  const double scale = h_.max_value() * theta_ * lmax * lmax;
  return 1e-3 * (1.0 + scale) * std::max(1.0, theta_ * rho_);
}

double EllipticalParams::support_bound() const {
  const double lmax = std::max(std::abs(nu_.min_value()), std::abs(nu_.max_value()));
  const double s = 1.0 + std::sqrt(theta_ * rho_);
  return std::max(h_.max_value() * theta_ * lmax * lmax, 1e-12) * s * s;
}

Complex mixing_integral(Complex w, const DiscreteMeasure& nu, double theta, double xi) {
  return mixing_with_derivative(w, nu, theta, xi).b;
}

EllipticalResult elliptical_solve(Complex z, const EllipticalParams& params,
                                  const SolverConfig& cfg, std::optional<Complex> initial) {
  if (!(z.imag() > 0.0)) throw InputError("z must lie in the upper half-plane");
  const FixedPointMap map = [&](Complex w) { return elliptical_map(z, w, params); };
  const Complex start = initial.value_or(-params.h().mean() / z);
  const FixedPoint fp = solve_fixed_point(map, start, true, cfg);

  EllipticalResult r;
  r.z = z;
  r.w = fp.w;
  r.iterations = fp.iterations;
  r.b = mixing_integral(fp.w, params.nu(), params.theta(), params.xi());
  const Complex b = r.b;
  r.m = params.h().integrate([&](double tau) { return 1.0 / (tau * b - z); });
  const Complex w_again = params.h().integrate([&](double tau) { return tau / (tau * b - z); });
  r.residual = std::abs(fp.w - w_again);
  r.consistency_residual = std::abs(1.0 + z * r.m - fp.w * b);
  return r;
}

Complex reduced_companion(const EllipticalResult& r) { return -r.b / r.z; }

std::vector<DensityPoint> elliptical_density_grid(const EllipticalParams& params,
                                                  std::span<const double> xs,
                                                  const SolverConfig& cfg) {
  cfg.validate();
  const double v_eps = cfg.v_eps > 0.0 ? cfg.v_eps : params.default_v_eps();
  const PointSolver solve = [&](Complex z, Complex w0) -> TransformResult {
    return elliptical_solve(z, params, cfg, w0);
  };
  const double first_moment = params.h().mean();
  const InitialGuess initial = [first_moment](Complex z) { return -first_moment / z; };
  return invert_density(solve, initial, xs, v_eps, params.atom_at_zero());
}

SymMatrix scaled_gram(const DataMatrix& x, std::size_t d, std::size_t p, std::size_t n) {
  if (x.rows() != n || x.cols() != d) throw InputError("data matrix must be n x d");
  if (p == 0 || n == 0) throw InputError("dimensions must be positive");
  const double scale = static_cast<double>(d) / static_cast<double>(p) / static_cast<double>(n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(x.matrix().cols(), x.matrix().cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x.matrix().transpose(), scale);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return SymMatrix(std::move(g));
}

}  // namespace rmt
