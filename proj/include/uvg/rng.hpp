#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace uvg {

/// Seeded random source. Every stochastic routine takes one explicitly.
/// Draws are built from raw 64-bit engine output so streams are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (one engine pair per draw, no caching).
  double normal();
  /// Uniform integer in [lo, hi], rejection sampled.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child source derived from this one's seed material.
  Rng split(std::uint64_t stream) const;

  std::string save_state() const;
  void load_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

/// Mixes a seed with a stream id (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace uvg
