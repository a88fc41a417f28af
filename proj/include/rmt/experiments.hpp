#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmt/elliptical_solver.hpp"
#include "rmt/linalg.hpp"
#include "rmt/mp_solver.hpp"
#include "rmt/samplers.hpp"

namespace rmt {

enum class Law { kMp, kElliptical };
enum class HSource { kAnalytic, kEmpirical };
enum class MatrixKind { kCorrelation, kCovariance, kScaledGram };

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct ExperimentSpec {
  PopulationModel model;
  Law law = Law::kMp;
  HSource h_source = HSource::kEmpirical;
  std::optional<GridSpec> grid;
  std::size_t replicates = 1;
  Seed seed{};
  /// Optional positive column rescaling applied to the simulated data.
  std::vector<double> column_scale;
  bool predict_edge = false;
  SolverConfig solver;
};

struct ComparisonResult {
  /// Mean over replicates.
  double ks_distance = 0.0;
  std::vector<double> ks_per_replicate;
  std::size_t ecdf_count = 0;
  double empirical_min = 0.0;
  double empirical_max = 0.0;
  std::optional<std::pair<double, double>> theoretical_support;
  /// Largest eigenvalue of the first replicate.
  double largest_eigenvalue = 0.0;
  std::vector<double> largest_per_replicate;
  std::optional<double> edge_prediction;
  /// max_i |sqrt(S_ii / Sigma_ii) - 1| of the first replicate (mp law only).
  std::optional<double> diagonal_statistic;
  /// Eigenvalues of the first replicate.
  Spectrum spectrum;
};

using CdfPoint = std::pair<double, double>;

std::vector<CdfPoint> cdf_points(std::span<const DensityPoint> pts);

/// sup |ECDF - F| with F linearly interpolated on the grid and F = 0 left of
/// the first grid point. Eigenvalues outside the grid (beyond a 1e-9
/// relative slack) raise InputError.
double ks_distance(const Spectrum& eigs, std::span<const CdfPoint> cdf);

/// KS distance between the laws conditioned on (threshold, inf); used to
/// remove an analytic atom at zero from the comparison.
double ks_distance_above(const Spectrum& eigs, std::span<const CdfPoint> cdf, double threshold);

/// Spectral law of a Toeplitz correlation family from its symbol
/// (1 - r^2) / (1 - 2 r cos w + r^2), w uniform on [0, pi].
DiscreteMeasure toeplitz_symbol_law(double r, std::size_t atoms = DiscreteMeasure::kDefaultQuantileAtoms);

/// Population correlation law H for the mp law.
DiscreteMeasure correlation_population_law(const PopulationModel& model, HSource source);

/// Solver parameters matching an elliptical-law experiment.
EllipticalParams elliptical_population_params(const PopulationModel& model, HSource source);

/// Simulates one data set and returns the requested matrix's spectrum.
Spectrum simulate_spectrum(const PopulationModel& model, MatrixKind kind, Seed seed,
                           std::span<const double> column_scale = {});

ComparisonResult run_correlation_experiment(const ExperimentSpec& spec);
ComparisonResult run_elliptical_experiment(const ExperimentSpec& spec);
ComparisonResult run_experiment(const ExperimentSpec& spec);

}  // namespace rmt
