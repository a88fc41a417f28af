#include "rmt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rmt {

namespace {

constexpr double kPsdTolerance = 1e-10;

Eigen::MatrixXd centered(const Eigen::MatrixXd& y) {
  const Eigen::RowVectorXd mean = y.colwise().mean();
  return y.rowwise() - mean;
}

}  // namespace

SymMatrix::SymMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InputError("symmetric matrix must be square");
  if (m_.rows() == 0) throw InputError("symmetric matrix must have positive dimension");
  if (!m_.allFinite()) throw InputError("matrix has non-finite entries");
  const double scale = m_.cwiseAbs().maxCoeff();
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale)
    throw InputError("matrix is not symmetric (asymmetry " + std::to_string(asym) + ")");
  if (asym > 0.0) m_ = 0.5 * (m_ + m_.transpose()).eval();
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return SymMatrix(Eigen::MatrixXd::Identity(d, d));
}

SymMatrix SymMatrix::zero(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return SymMatrix(Eigen::MatrixXd::Zero(d, d));
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& diag) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  return SymMatrix(v.asDiagonal().toDenseMatrix());
}

DataMatrix::DataMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (!m_.allFinite()) throw InputError("data matrix has non-finite entries");
}

Spectrum sym_eigenvalues(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  Spectrum s;
  s.source_dim = m.dim();
  const Eigen::VectorXd& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

double operator_norm(const SymMatrix& m) {
  const Spectrum s = sym_eigenvalues(m);
  return std::max(std::abs(s.min()), std::abs(s.max()));
}

SymMatrix sample_covariance(const DataMatrix& y) {
  if (y.rows() < 2) throw InputError("sample covariance needs at least 2 observations");
  const Eigen::MatrixXd c = centered(y.matrix());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(c.cols(), c.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose(), 1.0 / static_cast<double>(y.rows() - 1));
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return SymMatrix(std::move(s));
}

SymMatrix sample_correlation(const DataMatrix& y) {
  if (y.rows() < 2) throw InputError("sample correlation needs at least 2 observations");
  Eigen::MatrixXd c = centered(y.matrix());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double norm = c.col(j).norm();
    if (!(norm > 0.0)) throw InputError("degenerate column " + std::to_string(j));
    c.col(j) /= norm;
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(c.cols(), c.cols());
  r.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
  r.triangularView<Eigen::StrictlyUpper>() = r.transpose();
  r = r.cwiseMax(-1.0).cwiseMin(1.0);
  r.diagonal().setOnes();
  return SymMatrix(std::move(r));
}

SymMatrix corr_from_cov(const SymMatrix& s) {
  const Eigen::VectorXd d = s.matrix().diagonal();
  if ((d.array() <= 0.0).any()) throw InputError("covariance has nonpositive diagonal");
  const Eigen::VectorXd inv = d.array().sqrt().inverse();
  Eigen::MatrixXd c = inv.asDiagonal() * s.matrix() * inv.asDiagonal();
  c.diagonal().setOnes();
  return SymMatrix(std::move(c));
}

SymMatrix toeplitz_corr(std::size_t p, double r) {
  if (p == 0) throw InputError("toeplitz dimension must be positive");
  if (!(std::abs(r) < 1.0)) throw InputError("toeplitz parameter must satisfy |r| < 1");
  const auto n = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = std::pow(r, static_cast<double>(std::abs(i - j)));
  return SymMatrix(std::move(m));
}

SymMatrix matrix_sqrt_psd(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  Eigen::VectorXd ev = solver.eigenvalues();
  const double norm = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -kPsdTolerance * norm) throw InputError("not PSD");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  return SymMatrix(v * ev.asDiagonal() * v.transpose());
}

double largest_singular_value(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd gram = a.transpose() * a;
  return std::sqrt(std::max(0.0, sym_eigenvalues(SymMatrix(gram)).max()));
}

}  // namespace rmt
