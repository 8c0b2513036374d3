#pragma once

// Deterministic, portable random number utilities. Raw engine outputs are
// mapped to doubles by hand so that streams are reproducible across standard
// library implementations (std::uniform_real_distribution is not portable).

#include <cmath>
#include <cstdint>
#include <random>

namespace hyssim {

// SplitMix64 step; used to derive independent seed streams from a base seed.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derive the seed for a named sub-stream (trace shape, arrivals, sizes, ...)
// so that one user-facing seed yields independent generator streams.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t s = base ^ (0xD1B54A32D192ED03ull * (stream + 1));
  uint64_t a = splitmix64(s);
  uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Exponential with the given rate (rate > 0).
  double exponential(double rate) { return -std::log(1.0 - u01()) / rate; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hyssim
