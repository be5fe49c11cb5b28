#pragma once

#include <cstdint>
#include <string>

namespace owa {

// Small deterministic generator (splitmix64 core). We avoid <random>
// distributions so that sampled sequences are identical on every platform
// and toolchain; seeded reproducibility is a hard requirement for the
// experiment harness.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool chance(double p) { return uniform() < p; }

 private:
  uint64_t state_;
};

// Derives an independent stream from (seed, tag). Used to hand isolated
// generators to episodes, workers, and evaluations.
inline uint64_t derive_seed(uint64_t seed, uint64_t tag) {
  Rng r(seed ^ (0x6a09e667f3bcc909ULL + tag * 0x9e3779b97f4a7c15ULL));
  r.next_u64();
  return r.next_u64();
}

inline uint64_t derive_seed(uint64_t seed, const std::string& tag) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return derive_seed(seed, h);
}

}  // namespace owa
