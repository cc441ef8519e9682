#pragma once

#include <cstdint>

namespace qalin {

/// Counter-based uniform variates: the value for (seed, trajectory, step) is
/// a fixed hash of the triple, so trajectories are reproducible regardless of
/// evaluation order or thread scheduling.
class UniformStream {
 public:
  constexpr UniformStream(std::uint64_t seed, std::uint64_t trajectory = 0) noexcept
      : key_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) + trajectory)) {}

  /// Uniform in the open interval (0, 1), 53-bit resolution.
  constexpr double operator()(std::uint64_t step) const noexcept {
    const std::uint64_t bits = mix(key_ + 0x9e3779b97f4a7c15ULL * (step + 1)) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// splitmix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace qalin
