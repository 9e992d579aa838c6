#pragma once

// Deterministic random sampling. The distributions are hand-rolled on top of
// mt19937_64 because the std:: distribution templates are allowed to differ
// between standard library implementations, and generated datasets must be
// byte-identical for a given seed on every platform.

#include <cmath>
#include <cstdint>
#include <random>

#include "navmine/errors.hpp"

namespace navmine {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from a base seed and a stream index; used to
  // give every simulated user its own generator so that per-user output does
  // not depend on generation order.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(index + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi)
      fail(Errc::invalid_argument, "uniform_int: empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0)  // full 64-bit span
      return static_cast<std::int64_t>(next_u64());
    const unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(range);
    return lo + static_cast<std::int64_t>(static_cast<std::uint64_t>(m >> 64));
  }

  double exponential(double mean) {
    if (!(mean > 0.0))
      fail(Errc::invalid_argument, "exponential: mean must be > 0");
    return -mean * std::log1p(-uniform01());
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace navmine
