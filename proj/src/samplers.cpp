#include "rmt/samplers.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmt/parallel.hpp"

namespace rmt {

namespace {

// Standard normal n x p block, one counter stream per row.
Eigen::MatrixXd normal_block(std::size_t n, std::size_t p, Seed seed) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  parallel_for(n, [&](std::size_t i) {
    CounterRng rng(seed, StreamTag::kData, i);
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(static_cast<Eigen::Index>(i), j) = rng.normal();
  });
  return g;
}

double draw_from(const DiscreteMeasure& mu, double u) {
  double acc = 0.0;
  for (const auto& a : mu.atoms()) {
    acc += a.weight;
    if (u <= acc) return a.value;
  }
  return mu.max_value();
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::kGaussian: return "gaussian";
    case Family::kSphereElliptical: return "sphere_elliptical";
    case Family::kGaussianCopula: return "gaussian_copula";
    case Family::kLbBall: return "lb_ball";
    case Family::kBoundedIid: return "bounded_iid";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::kGaussian;
  if (name == "sphere_elliptical") return Family::kSphereElliptical;
  if (name == "gaussian_copula") return Family::kGaussianCopula;
  if (name == "lb_ball") return Family::kLbBall;
  if (name == "bounded_iid") return Family::kBoundedIid;
  throw InputError("unknown family '" + name + "'");
}

void PopulationModel::validate() const {
  if (n == 0 || p == 0) throw InputError("model dimensions must be positive");
  const auto rows = static_cast<std::size_t>(shape.rows());
  const auto cols = static_cast<std::size_t>(shape.cols());
  switch (family) {
    case Family::kSphereElliptical:
      if (d == 0) throw InputError("elliptical model needs d > 0");
      if (shape.size() == 0 && d != p) throw InputError("identity Gamma requires d == p");
      if (shape.size() != 0 && (rows != d || cols != p))
        throw InputError("Gamma must be d x p");
      if (!mixing_schedule.empty() && mixing_schedule.size() != n)
        throw InputError("mixing schedule must have n entries");
      break;
    case Family::kGaussianCopula: {
      const SymMatrix r = shape_matrix();
      if (r.dim() != p) throw InputError("copula correlation must be p x p");
      for (std::size_t i = 0; i < p; ++i)
        if (std::abs(r(i, i) - 1.0) > 1e-12) throw InputError("copula correlation needs unit diagonal");
      break;
    }
    case Family::kGaussian:
      if (shape.size() != 0 && (rows != p || cols != p)) throw InputError("Sigma must be p x p");
      break;
    case Family::kLbBall:
      if (!(b_exponent >= 1.0 && b_exponent <= 2.0)) throw InputError("b must lie in [1, 2]");
      break;
    case Family::kBoundedIid:
      if (!(bound >= 0.0)) throw InputError("bound must be nonnegative");
      break;
  }
  if (location.size() != 0 && static_cast<std::size_t>(location.size()) != row_dim())
    throw InputError("location has wrong dimension");
}

SymMatrix PopulationModel::shape_matrix() const {
  if (shape.size() == 0) return SymMatrix::identity(p);
  return SymMatrix(shape);
}

std::size_t PopulationModel::row_dim() const {
  return family == Family::kSphereElliptical ? d : p;
}

DataMatrix sample_gaussian(std::size_t n, const SymMatrix& sigma, Seed seed) {
  return sample_covariance_model(n, sigma, seed, NoiseKind::kNormal);
}

Eigen::VectorXd sample_sphere(std::size_t p, CounterRng& rng) {
  if (p == 0) throw InputError("sphere dimension must be positive");
  Eigen::VectorXd g(static_cast<Eigen::Index>(p));
  double norm = 0.0;
  do {
    for (Eigen::Index j = 0; j < g.size(); ++j) g(j) = rng.normal();
    norm = g.norm();
  } while (!(norm > 0.0));
  return g * (std::sqrt(static_cast<double>(p)) / norm);
}

Eigen::VectorXd sample_sphere(std::size_t p, Seed seed) {
  CounterRng rng(seed, StreamTag::kData, 0);
  return sample_sphere(p, rng);
}

DataMatrix sample_elliptical(const PopulationModel& model, Seed seed) {
  if (model.family != Family::kSphereElliptical) throw InputError("model is not sphere_elliptical");
  model.validate();
  const auto n = static_cast<Eigen::Index>(model.n);
  const auto d = static_cast<Eigen::Index>(model.d);
  const bool identity_gamma = model.shape.size() == 0;
  Eigen::MatrixXd out(n, d);
  parallel_for(model.n, [&](std::size_t i) {
    double lambda = 0.0;
    if (!model.mixing_schedule.empty()) {
      lambda = model.mixing_schedule[i];
    } else {
      CounterRng mix_rng(seed, StreamTag::kMixing, i);
      lambda = model.mixing ? draw_from(*model.mixing, mix_rng.uniform()) : 1.0;
    }
    CounterRng rng(seed, StreamTag::kData, i);
    const Eigen::VectorXd r = sample_sphere(model.p, rng);
    Eigen::VectorXd row = identity_gamma ? Eigen::VectorXd(r) : Eigen::VectorXd(model.shape * r);
    row *= lambda;
    if (model.location.size() != 0) row += model.location;
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  });
  return DataMatrix(std::move(out));
}

DataMatrix sample_gaussian_copula(std::size_t n, const SymMatrix& r, Seed seed) {
  for (std::size_t i = 0; i < r.dim(); ++i)
    if (std::abs(r(i, i) - 1.0) > 1e-12) throw InputError("copula correlation needs unit diagonal");
  const SymMatrix root = matrix_sqrt_psd(r);
  Eigen::MatrixXd v = normal_block(n, r.dim(), seed) * root.matrix();
  const double below_half = std::nextafter(0.5, 0.0);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      // Phi(x) - 1/2 written through erf to keep precision near zero.
      const double c = 0.5 * std::erf(v(i, j) / std::numbers::sqrt2);
      v(i, j) = std::clamp(c, -below_half, below_half);
    }
  }
  return DataMatrix(std::move(v));
}

DataMatrix sample_lb_ball(std::size_t n, std::size_t p, double b, Seed seed) {
  if (!(b >= 1.0 && b <= 2.0)) throw InputError("b must lie in [1, 2]");
  if (p == 0) throw InputError("dimension must be positive");
  const auto cols = static_cast<Eigen::Index>(p);
  const double scale = std::pow(static_cast<double>(p), 1.0 / b);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), cols);
  parallel_for(n, [&](std::size_t i) {
    CounterRng rng(seed, StreamTag::kData, i);
    Eigen::VectorXd g(cols);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      // |g|^b ~ Gamma(1/b, 1) gives density proportional to exp(-|t|^b).
      const double gamma = boost::math::gamma_p_inv(1.0 / b, rng.uniform());
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      g(j) = sign * std::pow(gamma, 1.0 / b);
      sum += gamma;
    }
    const double w = rng.exponential();
    const double radius = std::pow(sum + w, 1.0 / b);
    out.row(static_cast<Eigen::Index>(i)) = (g * (scale / radius)).transpose();
  });
  return DataMatrix(std::move(out));
}

DataMatrix sample_bounded_iid(std::size_t n, std::size_t p, double bound, Seed seed) {
  if (!(bound >= 0.0)) throw InputError("bound must be nonnegative");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  parallel_for(n, [&](std::size_t i) {
    CounterRng rng(seed, StreamTag::kData, i);
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(static_cast<Eigen::Index>(i), j) = bound * (2.0 * rng.uniform() - 1.0);
  });
  return DataMatrix(std::move(out));
}

DataMatrix sample_covariance_model(std::size_t n, const SymMatrix& sigma, Seed seed, NoiseKind noise) {
  const SymMatrix root = matrix_sqrt_psd(sigma);
  Eigen::MatrixXd x;
  if (noise == NoiseKind::kNormal) {
    x = normal_block(n, sigma.dim(), seed);
  } else {
    x = sample_bounded_iid(n, sigma.dim(), std::sqrt(3.0), seed).matrix();
  }
  return DataMatrix(x * root.matrix());
}

DataMatrix sample(const PopulationModel& model, Seed seed) {
  model.validate();
  DataMatrix y = [&] {
    switch (model.family) {
      case Family::kGaussian:
        return sample_covariance_model(model.n, model.shape_matrix(), seed, model.noise);
      case Family::kSphereElliptical:
        return sample_elliptical(model, seed);
      case Family::kGaussianCopula:
        return sample_gaussian_copula(model.n, model.shape_matrix(), seed);
      case Family::kLbBall:
        return sample_lb_ball(model.n, model.p, model.b_exponent, seed);
      case Family::kBoundedIid:
        return sample_bounded_iid(model.n, model.p, model.bound, seed);
    }
    throw InputError("unknown family");
  }();
  if (model.location.size() == 0 || model.family == Family::kSphereElliptical) return y;
  return DataMatrix(y.matrix().rowwise() + model.location.transpose());
}

Eigen::VectorXd population_mean(const PopulationModel& model) {
  if (model.location.size() != 0) return model.location;
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.row_dim()));
}

}  // namespace rmt
