#pragma once

#include <cstdint>
#include <limits>

namespace rmt {

/// Root seed of a simulation. Children for replicates are derived by
/// hashing, so any (seed, replicate, row) triple maps to its own stream.
struct Seed {
  std::uint64_t value = 0;

  Seed for_replicate(std::uint64_t replicate) const;
};

/// Stream identifiers keep draws for different purposes (directions,
/// mixing scalars, ...) independent even when they share a row index.
enum class StreamTag : std::uint64_t {
  kData = 1,
  kMixing = 2,
  kAuxiliary = 3,
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the k-th output is mix64(key + k * gamma), so
/// the output depends only on (key, k) and never on call history elsewhere.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(Seed seed, StreamTag tag, std::uint64_t row);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inverse CDF.
  double normal();

  /// Standard exponential by inverse CDF.
  double exponential();

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Quantile of the standard normal distribution, p in (0, 1).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace rmt
