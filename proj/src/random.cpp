#include "rmt/random.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

namespace rmt {

Seed Seed::for_replicate(std::uint64_t replicate) const {
  return Seed{mix64(mix64(value ^ 0x5851f42d4c957f2dULL) + mix64(replicate + 0x14057b7ef767814fULL))};
}

CounterRng::CounterRng(Seed seed, StreamTag tag, std::uint64_t row)
    : key_(mix64(mix64(mix64(seed.value) + static_cast<std::uint64_t>(tag)) ^ mix64(row + kGamma))) {}

double CounterRng::normal() { return normal_quantile(uniform()); }

double CounterRng::exponential() { return -std::log(uniform()); }

double normal_quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace rmt
