#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace vpip {

// splitmix64 finalizer; also used as the stable mixing hash for seed derivation.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// FNV-1a over a string, for deriving per-name seeds.
inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// xoshiro256++ stream seeded via splitmix64. All sampling algorithms are
// fixed here (no std::distribution) so sequences are identical everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& si : s_) {
      x = mix64(x);
      si = x;
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive range
  int uniform_int(int lo, int hi) {
    if (hi <= lo) return lo;
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  // standard normal via Box-Muller (one value per call, one pair of uniforms)
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // truncated normal: resample until |x| <= 2*stddev
  double trunc_normal(double stddev) {
    for (;;) {
      double x = normal() * stddev;
      if (std::abs(x) <= 2.0 * stddev) return x;
    }
  }

  // Exact Poisson. Knuth inversion on chunks of lambda <= 15 (a sum of
  // independent Poissons is Poisson with the summed rate).
  long poisson(double lambda) {
    long total = 0;
    while (lambda > 0.0) {
      double chunk = std::min(lambda, 15.0);
      lambda -= chunk;
      double limit = std::exp(-chunk);
      double p = 1.0;
      long k = -1;
      do {
        ++k;
        p *= uniform();
      } while (p > limit);
      total += k;
    }
    return total;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace vpip
