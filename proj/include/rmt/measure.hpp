#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

using Complex = std::complex<double>;

inline bool is_finite(Complex c) {
  return std::isfinite(c.real()) && std::isfinite(c.imag());
}

struct Atom {
  double value;
  double weight;
};

/// Finite atomic probability measure.
///
/// Atoms are kept sorted by value with near-duplicates (relative gap
/// <= 1e-12) merged. Weights are strictly positive and sum to one within
/// 1e-12. Instances are immutable after construction.
class DiscreteMeasure {
 public:
  static constexpr double kWeightTolerance = 1e-12;
  static constexpr double kMergeTolerance = 1e-12;
  static constexpr std::size_t kDefaultQuantileAtoms = 512;

  /// Throws InputError when the atoms violate the invariants.
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  static DiscreteMeasure point_mass(double value);

  /// Empirical spectral distribution: every eigenvalue gets mass 1/count.
  static DiscreteMeasure from_eigenvalues(std::span<const double> eigs);

  /// Equal-weight atoms at the quantiles (j - 1/2)/J of a continuous law.
  static DiscreteMeasure from_quantiles(const std::function<double(double)>& quantile,
                                        std::size_t count = kDefaultQuantileAtoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double min_value() const noexcept { return atoms_.front().value; }
  double max_value() const noexcept { return atoms_.back().value; }

  /// Right-continuous distribution function.
  double cdf(double x) const noexcept;

  /// Sum of weight * f(value). Throws NumericalError("singular integrand")
  /// if f is not finite at some atom.
  template <typename F>
  Complex integrate(F&& f) const {
    Complex acc{0.0, 0.0};
    for (const auto& a : atoms_) {
      const Complex v = f(a.value);
      if (!is_finite(v)) throw NumericalError("singular integrand");
      acc += a.weight * v;
    }
    return acc;
  }

  /// Real-valued convenience for moments and similar integrals.
  template <typename F>
  double integrate_real(F&& f) const {
    double acc = 0.0;
    for (const auto& a : atoms_) {
      const double v = f(a.value);
      if (!std::isfinite(v)) throw NumericalError("singular integrand");
      acc += a.weight * v;
    }
    return acc;
  }

  double mean() const;

  /// True when every atom sits at zero.
  bool is_zero() const noexcept { return atoms_.size() == 1 && atoms_.front().value == 0.0; }

 private:
  std::vector<Atom> atoms_;
};

}  // namespace rmt
