#include "rmt/mp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rmt {

namespace {

void check_population_law(const DiscreteMeasure& h) {
  if (h.min_value() < 0.0) throw InputError("population spectral law has negative support");
}

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InputError("rho must be positive");
}

// g(w) = -1 / (z - rho I(w)) with I(w) = int lambda / (1 + lambda w) dH.
MapValue companion_map(Complex z, Complex w, const DiscreteMeasure& h, double rho) {
  Complex first{0.0, 0.0};
  Complex second{0.0, 0.0};
  for (const auto& a : h.atoms()) {
    const Complex inv = 1.0 / (1.0 + a.value * w);
    if (!is_finite(inv)) throw NumericalError("singular integrand");
    first += a.weight * a.value * inv;
    second += a.weight * a.value * a.value * inv * inv;
  }
  const Complex denom = z - rho * first;
  return {-1.0 / denom, rho * second / (denom * denom)};
}

// Edge function int (lambda c / (1 - lambda c))^2 dH.
double edge_g(const DiscreteMeasure& h, double c) {
  double acc = 0.0;
  for (const auto& a : h.atoms()) {
    const double t = a.value * c / (1.0 - a.value * c);
    acc += a.weight * t * t;
  }
  return acc;
}

}  // namespace

TransformResult mp_companion_solve(Complex z, const DiscreteMeasure& h, double rho,
                                   const SolverConfig& cfg, std::optional<Complex> initial) {
  check_population_law(h);
  check_rho(rho);
  if (!(z.imag() > 0.0)) throw InputError("z must lie in the upper half-plane");
  const FixedPointMap map = [&](Complex w) { return companion_map(z, w, h, rho); };
  const FixedPoint fp = solve_fixed_point(map, initial.value_or(-1.0 / z), true, cfg);
  TransformResult r;
  r.z = z;
  r.w = fp.w;
  r.m = (fp.w + (1.0 - rho) / z) / rho;
  r.residual = mp_residual(z, fp.w, h, rho);
  r.iterations = fp.iterations;
  return r;
}

double mp_residual(Complex z, Complex w, const DiscreteMeasure& h, double rho) {
  const Complex integral = h.integrate([&](double l) { return l / (1.0 + l * w); });
  return std::abs(w + 1.0 / (z - rho * integral));
}

double mp_default_v_eps(const DiscreteMeasure& h, double rho) {
  return 1e-3 * (1.0 + h.max_value()) * std::max(1.0, rho);
}

double mp_atom_at_zero(double rho) { return std::max(0.0, 1.0 - 1.0 / rho); }

std::vector<DensityPoint> density_grid(const DiscreteMeasure& h, double rho,
                                       std::span<const double> xs, const SolverConfig& cfg) {
  check_population_law(h);
  check_rho(rho);
  cfg.validate();
  const double v_eps = cfg.v_eps > 0.0 ? cfg.v_eps : mp_default_v_eps(h, rho);
  const PointSolver solve = [&](Complex z, Complex w0) {
    return mp_companion_solve(z, h, rho, cfg, w0);
  };
  const InitialGuess initial = [](Complex z) { return -1.0 / z; };
  return invert_density(solve, initial, xs, v_eps, mp_atom_at_zero(rho));
}

double edge_c0_solve(const DiscreteMeasure& h, double n_over_p) {
  check_population_law(h);
  if (!(n_over_p > 0.0) || !std::isfinite(n_over_p)) throw InputError("n/p must be positive");
  const double lmax = h.max_value();
  if (!(lmax > 0.0)) throw NumericalError("no interior solution");
  // g increases from 0 at c = 0 to +inf at c = 1/lambda_max since the top
  // atom carries positive mass.
  double lo = 0.0;
  double hi = 1.0 / lmax;
  for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (edge_g(h, mid) < n_over_p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c0 = 0.5 * (lo + hi);
  if (!(c0 > 0.0 && c0 < 1.0 / lmax)) throw NumericalError("no interior solution");
  return c0;
}

double edge_mu(const DiscreteMeasure& h, double p_over_n, double c0) {
  const double lmax = h.max_value();
  if (!(c0 > 0.0) || !(lmax <= 0.0 || c0 < 1.0 / lmax))
    throw InputError("c0 must lie in (0, 1/lambda_max)");
  const double integral =
      h.integrate_real([&](double l) { return l * c0 / (1.0 - l * c0); });
  return (1.0 + p_over_n * integral) / c0;
}

EdgeResult edge(const DiscreteMeasure& h, double p_over_n) {
  check_rho(p_over_n);
  const double c0 = edge_c0_solve(h, 1.0 / p_over_n);
  return {c0, edge_mu(h, p_over_n, c0), p_over_n};
}

double mp_support_bound(const DiscreteMeasure& h, double rho) {
  const double s = 1.0 + std::sqrt(rho);
  return std::max(h.max_value(), 1e-12) * s * s;
}

}  // namespace rmt
