#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mmest {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives the seed of substream j from a master seed:
/// mix64(master ^ (j + 1) * golden gamma). Used both for per-run seeds and
/// for the mode/process/measurement substreams inside a run.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t j) {
  return mix64(master ^ (j + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Counter-based uniform stream (splitmix64): output k is a pure function
/// of (seed, k), so streams are reproducible and cheap to fork.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on (0, 1]; never returns 0 so log() is safe.
  double next_uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Standard normal variates via Box-Muller, two uniforms per draw.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : uniforms_(seed) {}

  double next() {
    const double u1 = uniforms_.next_uniform_pos();
    const double u2 = uniforms_.next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  SplitMix64 uniforms_;
};

}  // namespace mmest
