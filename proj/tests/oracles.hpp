#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Number of eigenvalues of a below sigma, from the signs of the pivots of
// an unpivoted LDL' factorization of a - sigma I (Sylvester's inertia).
inline int count_below(const Eigen::MatrixXd& a, double sigma) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd m = a - sigma * Eigen::MatrixXd::Identity(n, n);
  int negatives = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double pivot = m(k, k);
    if (pivot == 0.0) pivot = 1e-300;
    if (pivot < 0.0) ++negatives;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double f = m(i, k) / pivot;
      for (Eigen::Index j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return negatives;
}

// All eigenvalues by bisection on the inertia count.
inline std::vector<double> bisection_eigenvalues(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  double radius = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) radius = std::max(radius, a.row(i).cwiseAbs().sum());
  std::vector<double> eigs;
  for (int k = 0; k < n; ++k) {
    double lo = -radius - 1.0;
    double hi = radius + 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + radius); ++it) {
      const double mid = 0.5 * (lo + hi);
      (count_below(a, mid) > k ? hi : lo) = mid;
    }
    eigs.push_back(0.5 * (lo + hi));
  }
  return eigs;
}

// Roots of x^3 + b x^2 + c x + d with three real roots, descending.
inline std::vector<double> cubic_real_roots(double b, double c, double d) {
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double phi = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0)) / 3.0;
  std::vector<double> roots;
  for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - b / 3.0);
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

// Companion transform for population law delta_1: the root of
// z w^2 + (z + 1 - rho) w + 1 = 0 in the upper half-plane.
inline std::complex<double> null_companion(std::complex<double> z, double rho) {
  const std::complex<double> bq = z + 1.0 - rho;
  const std::complex<double> disc = std::sqrt(bq * bq - 4.0 * z);
  const std::complex<double> w1 = (-bq + disc) / (2.0 * z);
  const std::complex<double> w2 = (-bq - disc) / (2.0 * z);
  return w1.imag() > w2.imag() ? w1 : w2;
}

inline double null_density(double x, double rho) {
  const double a = std::pow(1.0 - std::sqrt(rho), 2);
  const double b = std::pow(1.0 + std::sqrt(rho), 2);
  if (x <= a || x >= b) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * rho * x);
}

// Closed-form density convolved with the Poisson kernel of width v, i.e.
// Im m(x + iv) / pi of the continuous part, by quadrature in the angle
// t = a + (b - a)(1 - cos th) / 2 that removes the square-root edges.
inline double smoothed_null_density(double x, double rho, double v, int nodes = 200000) {
  const double a = std::pow(1.0 - std::sqrt(rho), 2);
  const double b = std::pow(1.0 + std::sqrt(rho), 2);
  const double half = 0.5 * (b - a);
  const double h = std::numbers::pi / nodes;
  double acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double th = (k + 0.5) * h;
    const double t = a + half * (1.0 - std::cos(th));
    const double s = half * std::sin(th);
    const double f = s / (2.0 * std::numbers::pi * rho * t);
    acc += f * s * v / ((x - t) * (x - t) + v * v);
  }
  return acc * h / std::numbers::pi;
}

}  // namespace oracle
