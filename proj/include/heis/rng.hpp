#pragma once

// Counter-based SplitMix64 streams.
//
// A stream is identified by a 64-bit key. Draw k (k = 0, 1, ...) of the stream
// is mix64(key + (k + 1) * 0x9E3779B97F4A7C15), where mix64 is the SplitMix64
// finaliser. Sub-streams are keyed by derive(parent, index), so every trial,
// coset and ball owns a reproducible sequence that does not depend on the
// order in which work is scheduled.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace heis {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key of sub-stream `index` of the stream keyed `parent`.
constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent ^ mix64(index + kGolden));
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one variate per call, no caching).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform index in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * n) % n; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace heis
