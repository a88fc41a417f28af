#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmt/linalg.hpp"
#include "rmt/measure.hpp"
#include "rmt/random.hpp"
#include "rmt/samplers.hpp"

namespace rmt {

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
};

/// Fixed-width histogram; values outside [lo, hi] go to the end bins.
Histogram make_histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins);

/// Deviation statistics for one dimension of a Monte Carlo ladder.
struct DimensionStats {
  std::string label;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t reps = 0;
  double mean_deviation = 0.0;
  double max_deviation = 0.0;
  double sd = 0.0;
  std::vector<double> thresholds;
  std::vector<double> frequencies;
  std::vector<double> bounds;
  std::vector<double> bounds_raw;
  std::vector<double> standard_errors;
  /// ||Sigma||_2 / log(p) when Sigma is known.
  std::optional<double> sigma_norm_over_log_p;
};

struct ConcentrationReport {
  std::string statistic;
  std::uint64_t seed = 0;
  std::vector<DimensionStats> dims;
  bool passed = true;
  std::vector<std::string> failures;
};

/// Concatenates per-dimension reports of the same statistic.
ConcentrationReport combine_reports(const std::vector<ConcentrationReport>& parts);

/// (1/p) sum 1 / (lambda_i - z).
Complex empirical_stieltjes(const Spectrum& eigs, Complex z);

struct AzumaBound {
  double raw;
  double clamped;
};

/// 4 exp(-r^2 p^2 v^2 / (16 n)), also clamped to [0, 1].
AzumaBound azuma_bound(double r, std::size_t p, std::size_t n, double v);

/// Simulates reps data sets, forms M = sum r_i r_i' with r_i = y_i / sqrt(n),
/// and tabulates |m_p(z) - mean| against the Azuma bound at thresholds
/// {0.5, 1, 2, 4} * sqrt(n) / (p v). A frequency above bound + 3 binomial
/// standard errors marks the report as failed.
ConcentrationReport stieltjes_concentration_mc(const PopulationModel& model, Complex z,
                                               std::size_t reps, Seed seed);

/// Covariance of the centered direction vector r, when known: Sigma for
/// gaussian, the identity for sphere_elliptical, copula_cov(R) for the
/// copula and bound^2/3 Id for bounded_iid.
std::optional<SymMatrix> population_covariance(const PopulationModel& model);

/// Per replicate, max over rows of |r' M r / p - trace(M Sigma) / p|.
ConcentrationReport quadratic_form_deviation(const PopulationModel& model, const SymMatrix& m,
                                             std::size_t reps, Seed seed);

struct NormDiagnostic {
  std::vector<double> values;
  double max_deviation = 0.0;
};

/// ||row_i||^2 / p and the largest deviation from trace(Sigma)/p.
NormDiagnostic norm_diagnostic(const DataMatrix& y, double trace_sigma_over_p, bool center = false);

struct AngleDiagnostic {
  double max_offdiag = 0.0;
  double median = 0.0;
  Histogram histogram;
};

/// |r_i' r_j| / p over pairs i != j, 50 bins on [0, 1].
AngleDiagnostic angle_diagnostic(const DataMatrix& y);

/// max_i |sqrt(S(i,i) / Sigma(i,i)) - 1|; with Sigma = I this is the
/// diagonal statistic of a sample covariance of unit-variance data.
double diagonal_diagnostic(const SymMatrix& s, const std::optional<SymMatrix>& sigma = std::nullopt);

/// arcsin(R_ij / 2) / (2 pi).
SymMatrix copula_cov(const SymMatrix& r);

/// (1 / 2pi) (||R|| / 2 + 4 ||R||^2 (pi/6 - 1/2)).
double copula_norm_bound(const SymMatrix& r);

/// True iff the fraction of eigenvalues >= M = 10 (K + 1) is at most
/// (K + 1 + margin) / M, with K = trace(Sigma)/p.
bool tightness_check(const Spectrum& eigs, double trace_sigma_over_p, double margin);

/// Named verification suites: "lemma6", "quadform", "copula", "tightness".
/// reps = 0 selects each suite's default replicate count.
ConcentrationReport verify_suite(const std::string& suite, Seed seed, std::size_t reps = 0);

}  // namespace rmt
