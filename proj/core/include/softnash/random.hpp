#pragma once

#include <cstdint>

namespace softnash {

// SplitMix64 scalar stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Standard normals by Box-Muller over consecutive uniform pairs; both the
// cosine and the sine branch are used, in that order.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next();

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Per-trial stream seeds.
inline constexpr std::uint64_t kTrajectoryStreamTag = 0x5452414A45435431ULL;
inline constexpr std::uint64_t kHumanNoiseStreamTag = 0x48554D414E4E5331ULL;

}  // namespace softnash
