#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "rmt/elliptical_solver.hpp"
#include "rmt/errors.hpp"
#include "rmt/experiments.hpp"
#include "rmt/mp_solver.hpp"

using rmt::Complex;
using rmt::DiscreteMeasure;
using rmt::EllipticalParams;

namespace {

const DiscreteMeasure kDelta1 = DiscreteMeasure::point_mass(1.0);
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

std::vector<Complex> z_grid() {
  std::vector<Complex> zs;
  for (double x : {-1.0, 0.2, 0.8, 1.5, 3.0})
    for (double y : {0.01, 0.2, 1.0, 4.0}) zs.emplace_back(x, y);
  return zs;
}

}  // namespace

TEST_CASE("mixing integral") {
  CHECK(rmt::mixing_integral({0, 1}, DiscreteMeasure::point_mass(0.0), 1.0, 1.0) == Complex(0.0));
  CHECK(std::abs(rmt::mixing_integral(kGolden, kDelta1, 1.0, 1.0) - kGolden) <= 1e-12);

  // (1/2) / (1 + i) + (1/2) * 4 / (1 + 4i) = (1 - i)/4 + (2 - 8i)/17
  const Complex expected = Complex(0.25, -0.25) + Complex(2.0 / 17.0, -8.0 / 17.0);
  const Complex got = rmt::mixing_integral({0, 1}, DiscreteMeasure({{1, 0.5}, {2, 0.5}}), 1.0, 1.0);
  CHECK(std::abs(got - expected) <= 1e-14);
  CHECK(got.real() == doctest::Approx(0.36765).epsilon(1e-4));
  CHECK(got.imag() == doctest::Approx(-0.72059).epsilon(1e-4));

  CHECK_THROWS_AS(rmt::mixing_integral({-1, 0}, kDelta1, 1.0, 1.0), rmt::NumericalError);
}

TEST_CASE("mixing integral has nonpositive imaginary part on the upper half-plane") {
  const DiscreteMeasure nu({{0.3, 0.2}, {1, 0.5}, {2.5, 0.3}});
  for (Complex w : z_grid()) CHECK(rmt::mixing_integral(w, nu, 0.7, 0.9).imag() <= 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(EllipticalParams(kDelta1, kDelta1, 1.0, 0.5, 0.5));
  CHECK_THROWS_AS(EllipticalParams(kDelta1, kDelta1, 1.0, 0.5, 0.6), rmt::InputError);
  CHECK_THROWS_AS(EllipticalParams(DiscreteMeasure::point_mass(0.0), kDelta1, 1.0, 0.5), rmt::InputError);
  CHECK_THROWS_AS(EllipticalParams(kDelta1, DiscreteMeasure::point_mass(0.0), 1.0, 0.5), rmt::InputError);
  CHECK_THROWS_AS(EllipticalParams(DiscreteMeasure::point_mass(-1.0), kDelta1, 1.0, 0.5), rmt::InputError);
  CHECK_THROWS_AS(EllipticalParams(kDelta1, kDelta1, 0.0, 0.5), rmt::InputError);
  CHECK_THROWS_AS(EllipticalParams(DiscreteMeasure::point_mass(2e6), kDelta1, 1.0, 0.5), rmt::InputError);
  const EllipticalParams p(kDelta1, kDelta1, 2.0, 0.75);
  CHECK(p.xi() == doctest::Approx(3.0));
  CHECK(p.atom_at_zero() == doctest::Approx(1.0 - 1.0 / 1.5));
}

TEST_CASE("reduction to the null Marchenko-Pastur case") {
  const EllipticalParams p(kDelta1, kDelta1, 1.0, 1.0);
  const Complex z(-1.0, 1e-8);
  const auto r = rmt::elliptical_solve(z, p);
  const auto mp = rmt::mp_companion_solve(z, kDelta1, 1.0);
  CHECK(std::abs(r.w.real() - kGolden) <= 1e-8);
  CHECK(std::abs(r.w - mp.w) <= 1e-8);
  CHECK(std::abs((1.0 + z * r.m) - r.w * r.b) <= 1e-8);
  CHECK(std::abs((1.0 + z * r.m).real() - 0.381966) <= 1e-6);
}

TEST_CASE("reduction over a grid for general H and rho") {
  for (const auto& h : {kDelta1, DiscreteMeasure({{0.5, 0.5}, {2, 0.5}})})
    for (double rho : {0.4, 1.0, 2.0})
      for (Complex z : z_grid()) {
        const EllipticalParams p(h, kDelta1, 1.0, rho);
        const auto r = rmt::elliptical_solve(z, p);
        const auto mp = rmt::mp_companion_solve(z, h, rho);
        CHECK(std::abs(r.m - mp.m) <= 1e-8);
        CHECK(std::abs(rmt::reduced_companion(r) - mp.w) <= 1e-8);
      }
}

TEST_CASE("large z asymptotics") {
  const DiscreteMeasure h({{1, 0.5}, {3, 0.5}});
  const EllipticalParams p(h, DiscreteMeasure({{1, 0.5}, {2, 0.5}}), 1.0, 0.5);
  const Complex z(0, 1e6);
  const auto r = rmt::elliptical_solve(z, p);
  CHECK(std::abs(r.w + h.mean() / z) <= 1e-9 * h.mean());
}

TEST_CASE("upper half-plane, consistency identity and uniqueness") {
  const DiscreteMeasure nu({{0.5, 0.3}, {1, 0.4}, {2, 0.3}});
  const DiscreteMeasure h({{0.2, 0.25}, {1, 0.5}, {3, 0.25}});
  for (double theta : {0.5, 1.0, 2.0})
    for (double rho : {0.3, 1.5})
      for (Complex z : z_grid()) {
        const EllipticalParams p(h, nu, theta, rho);
        const auto a = rmt::elliptical_solve(z, p);
        const auto b = rmt::elliptical_solve(z, p, {}, Complex(0, 1));
        CHECK(a.w.imag() > 0.0);
        CHECK(a.m.imag() > 0.0);
        CHECK(a.b.imag() <= 0.0);
        CHECK(a.consistency_residual <= 100 * 1e-12 * std::max(1.0, std::abs(a.w * a.b)));
        CHECK(std::abs(a.w - b.w) <= 1e-8);
      }
}

TEST_CASE("density reduces to the Marchenko-Pastur density") {
  const EllipticalParams p(kDelta1, kDelta1, 1.0, 0.5);
  const auto xs = rmt::linspace(0.0, 4.0, 300);
  const auto ell = rmt::elliptical_density_grid(p, xs);
  const auto mp = rmt::density_grid(kDelta1, 0.5, xs);
  const double v = p.default_v_eps();
  for (std::size_t k = 0; k < xs.size(); ++k) CHECK(std::abs(ell[k].density - mp[k].density) <= 1e-6 + 5 * v);
}

TEST_CASE("density integrates to one") {
  const DiscreteMeasure nu({{1, 0.5}, {2, 0.5}});
  for (double rho : {0.5, 1.0, 2.0}) {
    const EllipticalParams p(kDelta1, nu, 1.0, rho);
    const auto xs = rmt::linspace(0.0, p.support_bound() + 1.0, 3000);
    const auto pts = rmt::elliptical_density_grid(p, xs);
    CHECK(std::abs(pts.back().cdf - 1.0) <= 0.02);
  }
}

TEST_CASE("scaled gram") {
  CHECK(rmt::scaled_gram(rmt::DataMatrix(Eigen::MatrixXd::Zero(4, 3)), 3, 3, 4).matrix().isZero());
  const auto s = rmt::scaled_gram(rmt::DataMatrix(Eigen::MatrixXd::Identity(2, 2)), 2, 2, 2).matrix();
  CHECK(s.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2)));

  Eigen::MatrixXd x(5, 3);
  x << 1, 2, 3, -1, 0.5, 2, 0, 0, 1, 4, -2, 0.3, 1.5, 1, -1;
  const auto g = rmt::scaled_gram(rmt::DataMatrix(x), 3, 3, 5).matrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 5; ++k) acc += x(k, i) * x(k, j);
      CHECK(std::abs(g(i, j) - acc / 5.0) <= 1e-14);
    }
  CHECK_THROWS_AS(rmt::scaled_gram(rmt::DataMatrix(x), 4, 3, 5), rmt::InputError);
}
