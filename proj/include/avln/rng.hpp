#pragma once

// Deterministic, platform-independent random streams. Standard-library
// distributions are implementation defined, so values are drawn directly from
// the 64-bit generator.

#include <cstdint>
#include <string_view>

namespace avln {

std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive combination of two 64-bit values.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

/// FNV-1a over the bytes of `s`.
std::uint64_t hash_string(std::string_view s);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace avln
