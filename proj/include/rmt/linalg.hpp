#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "rmt/errors.hpp"

namespace rmt {

/// Dense real symmetric matrix. Inputs whose asymmetry is within 1e-12
/// (relative to the largest entry) are symmetrized as (M + M')/2; larger
/// asymmetry or non-finite entries are rejected.
class SymMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix zero(std::size_t dim);
  static SymMatrix diagonal(const std::vector<double>& diag);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Observations in rows, variables in columns.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd m);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(m_.cols()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Eigenvalues sorted ascending.
struct Spectrum {
  std::vector<double> eigenvalues;
  std::size_t source_dim = 0;

  double max() const { return eigenvalues.back(); }
  double min() const { return eigenvalues.front(); }
};

Spectrum sym_eigenvalues(const SymMatrix& m);

/// Largest absolute eigenvalue.
double operator_norm(const SymMatrix& m);

/// (Y - Ybar)'(Y - Ybar) / (n - 1).
SymMatrix sample_covariance(const DataMatrix& y);

/// Pearson correlation; throws InputError("degenerate column") for a
/// constant column.
SymMatrix sample_correlation(const DataMatrix& y);

/// D^{-1/2} S D^{-1/2} with D = diag(S).
SymMatrix corr_from_cov(const SymMatrix& s);

/// Entries r^{|i-j|}.
SymMatrix toeplitz_corr(std::size_t p, double r);

/// Symmetric PSD square root. Eigenvalues below -1e-10 * ||M|| raise
/// InputError("not PSD"); smaller negative ones are clamped to zero.
SymMatrix matrix_sqrt_psd(const SymMatrix& m);

/// Largest singular value of a rectangular matrix via the Gram matrix.
double largest_singular_value(const Eigen::MatrixXd& a);

}  // namespace rmt
