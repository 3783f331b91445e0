#pragma once

#include <cstdint>
#include <limits>

namespace curvekit {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
///
/// Generators split work by counter: item i of a run seeded with s draws from
/// `SplitMix64::stream(s, i)`, so output does not depend on how items are
/// scheduled across threads.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t counter) {
    SplitMix64 g(seed ^ 0x6a09e667f3bcc909ULL);
    g.state_ ^= mix(counter + 0x9e3779b97f4a7c15ULL);
    return SplitMix64(g());
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace curvekit
