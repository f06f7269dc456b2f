// SPDX-License-Identifier: Apache-2.0

#ifndef CVCAP_RNG_HPP
#define CVCAP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace cvcap {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Counter-based standard normal stream. Stateless per index, so a draw
/// can be addressed directly and disjoint index ranges can be consumed
/// concurrently. Identical (seed, stream, index) always yields the same
/// value.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : base_(mix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1))) {}

  /// Uniform draw in the open interval (0, 1).
  double uniform(std::uint64_t index) const {
    const std::uint64_t bits =
        mix64(base_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw via the Box-Muller transform on two
  /// counter-addressed uniforms.
  double normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t base_;
};

}  // namespace cvcap

#endif  // CVCAP_RNG_HPP
