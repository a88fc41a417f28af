#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "rmt/concentration.hpp"
#include "rmt/errors.hpp"
#include "rmt/linalg.hpp"
#include "rmt/samplers.hpp"

using rmt::Complex;
using rmt::DataMatrix;
using rmt::Family;
using rmt::PopulationModel;
using rmt::Seed;
using rmt::Spectrum;
using rmt::SymMatrix;

namespace {

PopulationModel gaussian(std::size_t n, std::size_t p) {
  PopulationModel m;
  m.family = Family::kGaussian;
  m.n = n;
  m.p = p;
  return m;
}

Spectrum spectrum(std::vector<double> e) {
  Spectrum s;
  s.source_dim = e.size();
  s.eigenvalues = std::move(e);
  return s;
}

// Random correlation matrix from a one-factor-plus-noise construction.
SymMatrix random_correlation(std::size_t p, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd f(p, 3);
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    for (Eigen::Index j = 0; j < f.cols(); ++j) f(i, j) = g(gen);
  const Eigen::MatrixXd c = f * f.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p);
  return rmt::corr_from_cov(SymMatrix(c));
}

}  // namespace

TEST_CASE("empirical stieltjes transform") {
  CHECK(std::abs(rmt::empirical_stieltjes(spectrum({0.0}), {0, 1}) - Complex(0, 1)) <= 1e-15);
  CHECK(std::abs(rmt::empirical_stieltjes(spectrum({1.0, 3.0}), {2, 1}) - Complex(0, 0.5)) <= 1e-15);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> e(10);
    for (auto& v : e) v = 3 * g(gen);
    std::sort(e.begin(), e.end());
    CHECK(rmt::empirical_stieltjes(spectrum(e), {g(gen), 0.01 + std::abs(g(gen))}).imag() > 0.0);
  }
}

TEST_CASE("azuma bound") {
  const auto b = rmt::azuma_bound(0.1, 100, 100, 1.0);
  CHECK(b.raw == doctest::Approx(4.0 * std::exp(-0.0625)));
  CHECK(b.raw == doctest::Approx(3.7577).epsilon(1e-4));
  CHECK(b.clamped == 1.0);
  CHECK(rmt::azuma_bound(1e6, 100, 100, 1.0).raw == 0.0);
  const double r = 0.02, v = 0.5;
  const std::size_t p = 150, n = 300;
  const double ratio = rmt::azuma_bound(r, 2 * p, n, v).raw / rmt::azuma_bound(r, p, n, v).raw;
  CHECK(ratio == doctest::Approx(std::exp(-3.0 * r * r * p * p * v * v / (16.0 * n))));
}

TEST_CASE("stieltjes concentration stays under the bound") {
  const auto rep = rmt::stieltjes_concentration_mc(gaussian(100, 100), {0, 1}, 200, Seed{1});
  REQUIRE(rep.dims.size() == 1);
  const auto& d = rep.dims[0];
  CHECK(d.reps == 200);
  CHECK(d.thresholds.size() == 4);
  for (std::size_t k = 0; k < d.thresholds.size(); ++k) {
    const double se = std::sqrt(d.bounds[k] * (1 - d.bounds[k]) / 200.0);
    CHECK(d.frequencies[k] <= d.bounds[k] + 3 * se);
  }
  CHECK(rep.passed);
  CHECK_THROWS_AS(rmt::stieltjes_concentration_mc(gaussian(10, 10), {0, 1}, 10, Seed{1}), rmt::InputError);
}

TEST_CASE("stieltjes spread shrinks with dimension") {
  double prev = 1e300;
  for (std::size_t p : {50u, 100u, 200u}) {
    const auto rep = rmt::stieltjes_concentration_mc(gaussian(p, p), {0, 1}, 100, Seed{2});
    CHECK(rep.dims[0].sd < prev);
    prev = rep.dims[0].sd;
  }
}

TEST_CASE("zero covariance gives a deterministic transform") {
  auto m = gaussian(40, 30);
  m.shape = Eigen::MatrixXd::Zero(30, 30);
  const auto rep = rmt::stieltjes_concentration_mc(m, {0.5, 1}, 50, Seed{3});
  CHECK(rep.dims[0].max_deviation == 0.0);
  for (double f : rep.dims[0].frequencies) CHECK(f == 0.0);
}

TEST_CASE("quadratic form deviation") {
  const auto zero = rmt::quadratic_form_deviation(gaussian(50, 40), SymMatrix::zero(40), 5, Seed{1});
  CHECK(zero.dims[0].max_deviation == 0.0);

  PopulationModel sphere;
  sphere.family = Family::kSphereElliptical;
  sphere.n = 50;
  sphere.p = 100;
  sphere.d = 100;
  const auto s = rmt::quadratic_form_deviation(sphere, SymMatrix::identity(100), 5, Seed{1});
  CHECK(s.dims[0].max_deviation <= 1e-12);

  const auto small = rmt::quadratic_form_deviation(gaussian(100, 100), SymMatrix::identity(100), 20, Seed{4});
  const auto large = rmt::quadratic_form_deviation(gaussian(100, 400), SymMatrix::identity(400), 20, Seed{4});
  CHECK(large.dims[0].mean_deviation < small.dims[0].mean_deviation);

  PopulationModel ball;
  ball.family = Family::kLbBall;
  ball.n = 10;
  ball.p = 10;
  ball.b_exponent = 1.5;
  CHECK_THROWS_WITH_AS(rmt::quadratic_form_deviation(ball, SymMatrix::identity(10), 5, Seed{1}),
                       "no population covariance available", rmt::InputError);
}

TEST_CASE("norm diagnostic") {
  Eigen::MatrixXd rows(30, 64);
  for (int i = 0; i < 30; ++i) rows.row(i) = rmt::sample_sphere(64, Seed{static_cast<std::uint64_t>(i)}).transpose();
  const auto d = rmt::norm_diagnostic(DataMatrix(rows), 1.0);
  for (double v : d.values) CHECK(std::abs(v - 1.0) <= 1e-12);
  CHECK(d.max_deviation <= 1e-12);

  const auto z = rmt::norm_diagnostic(DataMatrix(Eigen::MatrixXd::Zero(3, 4)), 0.0);
  for (double v : z.values) CHECK(v == 0.0);
  CHECK(z.max_deviation == 0.0);
}

TEST_CASE("angle diagnostic") {
  const auto orth = rmt::angle_diagnostic(DataMatrix(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(orth.max_offdiag == 0.0);
  CHECK(orth.histogram.counts.size() == 50);

  Eigen::MatrixXd twin(2, 9);
  twin.row(0) = rmt::sample_sphere(9, Seed{3}).transpose();
  twin.row(1) = twin.row(0);
  CHECK(rmt::angle_diagnostic(DataMatrix(twin)).max_offdiag == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("angle median shrinks as p doubles") {
  const auto a = rmt::angle_diagnostic(rmt::sample(gaussian(200, 200), Seed{5}));
  const auto b = rmt::angle_diagnostic(rmt::sample(gaussian(200, 400), Seed{5}));
  CHECK(b.median < a.median);
}

TEST_CASE("diagonal diagnostic") {
  CHECK(rmt::diagonal_diagnostic(SymMatrix::diagonal({1.21, 1.0, 0.81})) == doctest::Approx(0.1));
  CHECK(rmt::diagonal_diagnostic(SymMatrix::diagonal({4.0, 9.0}), SymMatrix::diagonal({4.0, 9.0})) == 0.0);
}

TEST_CASE("copula covariance") {
  const auto id = rmt::copula_cov(SymMatrix::identity(5)).matrix();
  for (int i = 0; i < 5; ++i) CHECK(id(i, i) == 1.0 / 12.0);
  CHECK((id - Eigen::MatrixXd::Identity(5, 5) / 12.0).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd r(2, 2);
  r << 1, 0.5, 0.5, 1;
  const double expected = std::asin(0.25) / (2 * std::numbers::pi);
  CHECK(rmt::copula_cov(SymMatrix(r)).matrix()(0, 1) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(expected == doctest::Approx(0.0402152).epsilon(1e-6));

  r(0, 1) = r(1, 0) = 1.2;
  CHECK_THROWS_AS(rmt::copula_cov(SymMatrix(r)), rmt::InputError);
}

TEST_CASE("copula norm bound") {
  const double b = rmt::copula_norm_bound(SymMatrix::identity(3));
  CHECK(b == doctest::Approx((0.5 + 4 * (std::numbers::pi / 6 - 0.5)) / (2 * std::numbers::pi)));
  CHECK(b == doctest::Approx(0.0946011).epsilon(1e-6));
  CHECK(rmt::operator_norm(rmt::copula_cov(SymMatrix::identity(3))) <= b);

  std::mt19937_64 gen(17);
  for (int t = 0; t < 100; ++t) {
    const auto r = random_correlation(50, gen);
    const auto c = rmt::copula_cov(r);
    CHECK(rmt::operator_norm(c) <= rmt::copula_norm_bound(r));
    CHECK(rmt::sym_eigenvalues(c).min() >= -1e-10);
  }
}

TEST_CASE("tightness check") {
  CHECK(rmt::tightness_check(spectrum(std::vector<double>(10, 0.0)), 1.0, 0.0));
  const auto null = rmt::sym_eigenvalues(rmt::sample_covariance(rmt::sample(gaussian(200, 200), Seed{2})));
  CHECK(null.max() < 20.0);
  CHECK(rmt::tightness_check(null, 1.0, 0.0));
  std::vector<double> bad(7, 1.0);
  // 30% of the mass at the threshold M = 10 (K + 1) itself.
  bad.insert(bad.end(), 3, 20.0);
  CHECK_FALSE(rmt::tightness_check(spectrum(bad), 1.0, 0.0));
}

TEST_CASE("histograms clamp out-of-range values to the end bins") {
  const auto h = rmt::make_histogram({-1.0, 0.05, 0.5, 2.0}, 0.0, 1.0, 10);
  CHECK(h.counts.front() == 2);
  CHECK(h.counts.back() == 1);
  CHECK(h.counts[5] == 1);
}

TEST_CASE("unknown suite is an input error") {
  CHECK_THROWS_AS(rmt::verify_suite("nope", Seed{0}), rmt::InputError);
}
