#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rmt/measure.hpp"
#include "rmt/stieltjes.hpp"

namespace rmt {

/// Right edge of the limiting spectrum via the c0 characterization.
struct EdgeResult {
  double c0;
  double mu;
  double rho;
};

/// Companion transform w(z) solving
///   -1/w = z - rho * int lambda dH(lambda) / (1 + lambda w),
/// the unique solution in the upper half-plane, together with
/// m = (w + (1 - rho)/z) / rho.
///
/// H must be supported on [0, inf); Im z > 0. Starts from -1/z unless an
/// initial value is given.
TransformResult mp_companion_solve(Complex z, const DiscreteMeasure& h, double rho,
                                   const SolverConfig& cfg = {},
                                   std::optional<Complex> initial = std::nullopt);

/// |w + 1/(z - rho int lambda dH / (1 + lambda w))|, evaluated from scratch.
double mp_residual(Complex z, Complex w, const DiscreteMeasure& h, double rho);

/// 1e-3 * (1 + max atom of H) * max(1, rho).
double mp_default_v_eps(const DiscreteMeasure& h, double rho);

/// Mass of the zero eigenvalues forced by p > n: max(0, 1 - 1/rho).
double mp_atom_at_zero(double rho);

/// Density and CDF of the limiting law on the grid xs.
std::vector<DensityPoint> density_grid(const DiscreteMeasure& h, double rho,
                                       std::span<const double> xs, const SolverConfig& cfg = {});

/// c0 in (0, 1/lambda_max) with int (lambda c0 / (1 - lambda c0))^2 dH = n/p.
double edge_c0_solve(const DiscreteMeasure& h, double n_over_p);

/// (1/c0) (1 + (p/n) int lambda c0 / (1 - lambda c0) dH).
double edge_mu(const DiscreteMeasure& h, double p_over_n, double c0);

EdgeResult edge(const DiscreteMeasure& h, double p_over_n);

/// Upper bound on the support of the limiting law, for grid construction.
double mp_support_bound(const DiscreteMeasure& h, double rho);

}  // namespace rmt
