#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rmt/linalg.hpp"
#include "rmt/measure.hpp"
#include "rmt/stieltjes.hpp"

namespace rmt {

/// Parameters of the coupled system for generalized elliptical data:
/// H is the spectral law of T = Gamma Sigma Gamma', nu the law of the
/// mixing scalars, theta = lim d/p, rho = lim p/n and xi = theta^2 rho.
class EllipticalParams {
 public:
  static constexpr double kMomentGuard = 1e6;

  /// Validates the parameters; a supplied xi must match theta^2 rho to
  /// 1e-12 relative.
  EllipticalParams(DiscreteMeasure h, DiscreteMeasure nu, double theta, double rho,
                   std::optional<double> xi = std::nullopt);

  const DiscreteMeasure& h() const noexcept { return h_; }
  const DiscreteMeasure& nu() const noexcept { return nu_; }
  double theta() const noexcept { return theta_; }
  double rho() const noexcept { return rho_; }
  double xi() const noexcept { return xi_; }

  /// Mass of the zero eigenvalues forced by rank: max(0, 1 - 1/(theta rho)).
  double atom_at_zero() const noexcept;

  /// Default Stieltjes inversion offset, scaled like the top of the spectrum.
  double default_v_eps() const;

  /// Upper bound on the support, for grid construction.
  double support_bound() const;

 private:
  DiscreteMeasure h_;
  DiscreteMeasure nu_;
  double theta_;
  double rho_;
  double xi_;
};

struct EllipticalResult : TransformResult {
  /// b = int theta lambda^2 / (1 + xi lambda^2 w) dnu.
  Complex b;
  /// |1 + z m - w b|.
  double consistency_residual = 0.0;
};

/// int theta lambda^2 / (1 + xi lambda^2 w) dnu(lambda).
Complex mixing_integral(Complex w, const DiscreteMeasure& nu, double theta, double xi);

/// Solves w = int tau dH(tau) / (tau b(w) - z) in the upper half-plane and
/// returns m = int dH(tau) / (tau b(w) - z). Starts from -int tau dH / z
/// unless an initial value is given.
EllipticalResult elliptical_solve(Complex z, const EllipticalParams& params,
                                  const SolverConfig& cfg = {},
                                  std::optional<Complex> initial = std::nullopt);

/// For nu = delta_1 and theta = 1 the system collapses to the
/// Marchenko-Pastur equation; -b/z is then its companion transform.
Complex reduced_companion(const EllipticalResult& r);

std::vector<DensityPoint> elliptical_density_grid(const EllipticalParams& params,
                                                  std::span<const double> xs,
                                                  const SolverConfig& cfg = {});

/// (d/p) X'X / n for an n x d data matrix.
SymMatrix scaled_gram(const DataMatrix& x, std::size_t d, std::size_t p, std::size_t n);

}  // namespace rmt
