#pragma once

// Machinery shared by the Marchenko-Pastur and elliptical solvers: a damped
// fixed-point iteration with guarded Newton acceleration, and density
// recovery by Stieltjes inversion along a continuation path.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rmt/measure.hpp"

namespace rmt {

struct SolverConfig {
  double tol = 1e-12;
  int max_iters = 10000;
  /// Initial relaxation in (0, 1]; halved when the residual stalls.
  double damping = 1.0;
  /// Imaginary offset for density recovery; <= 0 selects the solver default.
  double v_eps = 0.0;

  void validate() const;
};

struct TransformResult {
  Complex z;
  Complex w;
  Complex m;
  double residual = 0.0;
  int iterations = 0;
};

struct DensityPoint {
  double x;
  double density;
  double cdf;
};

/// Value and derivative of a fixed-point map w -> g(w).
struct MapValue {
  Complex value;
  Complex derivative;
};

using FixedPointMap = std::function<MapValue(Complex)>;

struct FixedPoint {
  Complex w;
  double residual;
  int iterations;
};

/// Solves w = g(w) starting from w0. Each step tries a Newton update on
/// w - g(w) and keeps it only if it stays in the upper half-plane (when
/// Im z > 0) and lowers the residual; otherwise it takes the relaxed step
/// w <- (1 - delta) w + delta g(w). Convergence means
/// |w - g(w)| <= tol * max(1, |w|). Throws NumericalError on failure.
FixedPoint solve_fixed_point(const FixedPointMap& map, Complex w0, bool keep_upper,
                             const SolverConfig& cfg);

/// Solves at z = x + i v_eps for each x, warm-starting from the neighbour.
/// Points are processed in fixed-size segments (independent of the thread
/// count), each segment entering from Im z = 1 and stepping down
/// geometrically to v_eps.
///
/// `solve(z, w0)` returns the converged transform; `initial(z)` supplies a
/// cold start. The density is Im m / pi with the Lorentzian of the analytic
/// atom at zero removed. The CDF is the trapezoidal integral plus the atom;
/// when the grid starts at x <= 0 it also includes the smoothed mass that
/// spills below the first grid point.
using PointSolver = std::function<TransformResult(Complex, Complex)>;
using InitialGuess = std::function<Complex(Complex)>;

std::vector<DensityPoint> invert_density(const PointSolver& solve, const InitialGuess& initial,
                                         std::span<const double> xs, double v_eps,
                                         double atom_at_zero);

/// Range of grid points where the density exceeds the threshold.
std::optional<std::pair<double, double>> support_from_density(std::span<const DensityPoint> pts,
                                                              double threshold);

/// count points evenly spaced on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace rmt
