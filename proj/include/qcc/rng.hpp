#pragma once

// Deterministic member-indexed random streams.  Every ensemble member draws
// from its own splitmix64 stream derived from (seed, member index), so the
// sample set is reproducible bit-for-bit regardless of worker partitioning.

#include <cmath>
#include <cstdint>

namespace qcc {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  // Hash (seed, stream) through the output mix so that member streams start
  // at well-separated states; with the raw additive offset, consecutive
  // streams would walk overlapping counter sequences.
  SplitMix64(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed + mix(stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix(z);
  }

  // uniform in (0, 1]
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  // independent standard normals via Box-Muller
  void normal_pair(double& a, double& b) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    a = rad * std::cos(ang);
    b = rad * std::sin(ang);
  }

 private:
  std::uint64_t state_;
};

}  // namespace qcc
