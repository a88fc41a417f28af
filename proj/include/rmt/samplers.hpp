#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rmt/linalg.hpp"
#include "rmt/measure.hpp"
#include "rmt/random.hpp"

namespace rmt {

enum class Family { kGaussian, kSphereElliptical, kGaussianCopula, kLbBall, kBoundedIid };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Entry law of X in the Y = X * Sigma^{1/2} model.
enum class NoiseKind { kNormal, kUniform };

/// A sampling family with its parameters.
///
/// `shape` is Sigma for gaussian, R for gaussian_copula and the d x p factor
/// Gamma for sphere_elliptical; an empty matrix means the identity.
/// `mixing` is the law of the scalars lambda_i (elliptical only, default
/// lambda = 1); when
/// `mixing_schedule` is non-empty it is used verbatim as lambda_1..lambda_n.
struct PopulationModel {
  Family family = Family::kGaussian;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t d = 0;
  Eigen::MatrixXd shape;
  std::optional<DiscreteMeasure> mixing;
  std::vector<double> mixing_schedule;
  double b_exponent = 2.0;
  double bound = 1.0;
  Eigen::VectorXd location;
  NoiseKind noise = NoiseKind::kNormal;
  /// Set when shape was built as toeplitz_corr(p, r); lets callers use the
  /// closed-form symbol of the Toeplitz family.
  std::optional<double> toeplitz_r;

  /// Throws InputError when dimensions or family parameters are inconsistent.
  void validate() const;

  /// Shape as a symmetric matrix (identity when empty).
  SymMatrix shape_matrix() const;

  /// Dimension of the generated rows: d for elliptical, p otherwise.
  std::size_t row_dim() const;
};

DataMatrix sample_gaussian(std::size_t n, const SymMatrix& sigma, Seed seed);

/// Uniform direction on the unit sphere scaled to Euclidean norm sqrt(p).
Eigen::VectorXd sample_sphere(std::size_t p, CounterRng& rng);
Eigen::VectorXd sample_sphere(std::size_t p, Seed seed);

/// Rows mu + lambda_i * Gamma * (sqrt(p) r_i).
DataMatrix sample_elliptical(const PopulationModel& model, Seed seed);

/// Rows Phi(v) - 1/2 with v ~ N(0, R).
DataMatrix sample_gaussian_copula(std::size_t n, const SymMatrix& r, Seed seed);

/// Rows uniform on the unit l_b ball, scaled by p^{1/b}.
DataMatrix sample_lb_ball(std::size_t n, std::size_t p, double b, Seed seed);

/// I.i.d. entries uniform on [-bound, bound].
DataMatrix sample_bounded_iid(std::size_t n, std::size_t p, double bound, Seed seed);

/// Y = X * Sigma^{1/2} with unit-variance i.i.d. entries in X.
DataMatrix sample_covariance_model(std::size_t n, const SymMatrix& sigma, Seed seed,
                                   NoiseKind noise = NoiseKind::kNormal);

/// Dispatches on model.family.
DataMatrix sample(const PopulationModel& model, Seed seed);

/// Population mean of the generated rows.
Eigen::VectorXd population_mean(const PopulationModel& model);

}  // namespace rmt
