#include "rmt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rmt {

namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= DiscreteMeasure::kMergeTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InputError("measure has no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value)) throw InputError("measure atom value is not finite");
    if (!std::isfinite(a.weight) || a.weight <= 0.0)
      throw InputError("measure atom weight must be positive, got " + std::to_string(a.weight));
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw InputError("measure weights sum to " + std::to_string(total) + ", expected 1");

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  atoms_.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (!atoms_.empty() && nearly_equal(atoms_.back().value, a.value)) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
}

DiscreteMeasure DiscreteMeasure::point_mass(double value) {
  return DiscreteMeasure({{value, 1.0}});
}

DiscreteMeasure DiscreteMeasure::from_eigenvalues(std::span<const double> eigs) {
  if (eigs.empty()) throw InputError("empty spectrum");
  std::vector<double> sorted(eigs.begin(), eigs.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  std::size_t i = 0;
  while (i < sorted.size()) {
    if (!std::isfinite(sorted[i])) throw InputError("eigenvalue is not finite");
    std::size_t j = i + 1;
    while (j < sorted.size() && nearly_equal(sorted[i], sorted[j])) ++j;
    atoms.push_back({sorted[i], static_cast<double>(j - i) / count});
    i = j;
  }
  // Weights k/count summed in floating point can miss 1 by a few ulps;
  // renormalize so the invariant holds exactly.
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  for (auto& a : atoms) a.weight /= total;
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure DiscreteMeasure::from_quantiles(const std::function<double(double)>& quantile,
                                                std::size_t count) {
  if (count == 0) throw InputError("quantile atom count must be positive");
  std::vector<Atom> atoms;
  atoms.reserve(count);
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double q = (static_cast<double>(j) + 0.5) * w;
    atoms.push_back({quantile(q), w});
  }
  return DiscreteMeasure(std::move(atoms));
}

double DiscreteMeasure::cdf(double x) const noexcept {
  double acc = 0.0;
  for (const auto& a : atoms_) {
    if (a.value > x) break;
    acc += a.weight;
  }
  return std::min(acc, 1.0);
}

double DiscreteMeasure::mean() const {
  return integrate_real([](double v) { return v; });
}

}  // namespace rmt
