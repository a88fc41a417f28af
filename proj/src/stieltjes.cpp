#include "rmt/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "rmt/parallel.hpp"

namespace rmt {

namespace {

constexpr int kStallWindow = 20;
constexpr std::size_t kSegmentSize = 32;
constexpr double kContinuationStart = 1.0;
constexpr double kContinuationFactor = 0.25;

std::optional<MapValue> try_map(const FixedPointMap& map, Complex w) {
  try {
    MapValue e = map(w);
    if (!is_finite(e.value)) return std::nullopt;
    return e;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

// Solves at x + i*v_eps starting from a cold guess at Im z = 1.
TransformResult solve_with_continuation(const PointSolver& solve, const InitialGuess& initial,
                                        double x, double v_eps) {
  double v = std::max(kContinuationStart, v_eps);
  Complex z{x, v};
  TransformResult r = solve(z, initial(z));
  while (v > v_eps) {
    v = std::max(v * kContinuationFactor, v_eps);
    z = Complex{x, v};
    r = solve(z, r.w);
  }
  return r;
}

double recovered_density(const TransformResult& r, double v_eps, double atom_at_zero) {
  const double lorentz = atom_at_zero * v_eps / std::norm(r.z);
  return std::max(0.0, (r.m.imag() - lorentz) / std::numbers::pi);
}

// Mass of the smoothed density on (-inf, x0] for x0 <= 0, where the limit
// law itself has no mass; what is there is the Lorentzian spill-over of
// mass near zero. Substituting x = x0 - v ((1 - t) / t)^2 keeps the
// integrand bounded for both x^-2 and x^-3/2 decay.
double left_tail_mass(const PointSolver& solve, const InitialGuess& initial, double x0, double v_eps,
                      double atom_at_zero) {
  const auto integrand = [&](double t) {
    const double u = (1.0 - t) / t;
    const double x = x0 - v_eps * u * u;
    const double jacobian = 2.0 * v_eps * u / (t * t);
    return recovered_density(solve_with_continuation(solve, initial, x, v_eps), v_eps, atom_at_zero) * jacobian;
  };
  return boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, 1.0);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw InputError("solver tolerance must be positive");
  if (max_iters < 1) throw InputError("max_iters must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw InputError("damping must lie in (0, 1]");
}

FixedPoint solve_fixed_point(const FixedPointMap& map, Complex w0, bool keep_upper,
                             const SolverConfig& cfg) {
  cfg.validate();
  Complex w = w0;
  MapValue e = map(w);
  double delta = cfg.damping;
  double prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  double res = std::abs(w - e.value);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (!std::isfinite(res)) throw NumericalError("fixed-point iteration diverged", res);
    if (res <= cfg.tol * std::max(1.0, std::abs(w))) {
      if (keep_upper && !(w.imag() > 0.0))
        throw NumericalError("fixed point left the upper half-plane", res);
      return {w, res, it};
    }

    bool accepted = false;
    const Complex denom = 1.0 - e.derivative;
    if (std::abs(denom) > 0.0) {
      const Complex wn = w - (w - e.value) / denom;
      if (is_finite(wn) && (!keep_upper || wn.imag() > 0.0)) {
        if (auto en = try_map(map, wn)) {
          const double rn = std::abs(wn - en->value);
          if (rn < res) {
            w = wn;
            e = *en;
            res = rn;
            accepted = true;
          }
        }
      }
    }
    if (!accepted) {
      w = (1.0 - delta) * w + delta * e.value;
      e = map(w);
      res = std::abs(w - e.value);
      if (res >= prev) {
        if (++stall >= kStallWindow) {
          delta *= 0.5;
          stall = 0;
        }
      } else {
        stall = 0;
      }
    }
    prev = res;
  }
  std::ostringstream msg;
  msg << "fixed-point iteration did not converge in " << cfg.max_iters
      << " iterations (residual " << res << ")";
  throw NumericalError(msg.str(), res);
}

std::vector<DensityPoint> invert_density(const PointSolver& solve, const InitialGuess& initial,
                                         std::span<const double> xs, double v_eps,
                                         double atom_at_zero) {
  if (!(v_eps > 0.0)) throw InputError("v_eps must be positive");
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (!(xs[k] > xs[k - 1])) throw InputError("grid must be strictly ascending");

  std::vector<DensityPoint> out(xs.size());
  const std::size_t segments = (xs.size() + kSegmentSize - 1) / kSegmentSize;
  parallel_for(segments, [&](std::size_t s) {
    const std::size_t begin = s * kSegmentSize;
    const std::size_t end = std::min(begin + kSegmentSize, xs.size());
    std::optional<Complex> warm;
    for (std::size_t k = begin; k < end; ++k) {
      const double x = xs[k];
      TransformResult r;
      try {
        if (warm) {
          try {
            r = solve(Complex{x, v_eps}, *warm);
          } catch (const NumericalError&) {
            r = solve_with_continuation(solve, initial, x, v_eps);
          }
        } else {
          r = solve_with_continuation(solve, initial, x, v_eps);
        }
      } catch (const NumericalError& err) {
        std::ostringstream msg;
        msg << "solver failed at x = " << x << ": " << err.what();
        throw NumericalError(msg.str(), err.residual());
      }
      warm = r.w;
      out[k] = {x, recovered_density(r, v_eps, atom_at_zero), 0.0};
    }
  });

  double acc = 0.0;
  if (!xs.empty() && xs.front() <= 0.0) {
    try {
      acc = left_tail_mass(solve, initial, xs.front(), v_eps, atom_at_zero);
    } catch (const NumericalError& err) {
      throw NumericalError(std::string("solver failed left of the grid: ") + err.what(), err.residual());
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k > 0) acc += 0.5 * (out[k].density + out[k - 1].density) * (out[k].x - out[k - 1].x);
    out[k].cdf = acc + (out[k].x >= 0.0 ? atom_at_zero : 0.0);
  }
  return out;
}

std::optional<std::pair<double, double>> support_from_density(std::span<const DensityPoint> pts,
                                                              double threshold) {
  std::optional<std::pair<double, double>> range;
  for (const auto& p : pts) {
    if (p.density <= threshold) continue;
    if (!range) range = std::pair{p.x, p.x};
    range->second = p.x;
  }
  return range;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> xs(count);
  if (count == 1) {
    xs[0] = lo;
    return xs;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) xs[k] = lo + step * static_cast<double>(k);
  xs.back() = hi;
  return xs;
}

}  // namespace rmt
