#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <span>
#include <string_view>

namespace avsim::core {

// Every random draw in the simulator comes from a stream derived from the
// master seed and a logical key (purpose tag + entity ids). Identical keys
// give identical streams regardless of thread count or evaluation order,
// which is what makes paired scenario runs share their random numbers.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t hash_str(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t mix_key(uint64_t a, uint64_t b) {
  uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
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
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // [0, n), n > 0. Fixed-point multiply keeps it branch-free and deterministic.
  uint64_t below(uint64_t n) {
    return uint64_t((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  // Box-Muller; always consumes exactly two uniforms.
  double normal(double mean = 0.0, double sd = 1.0) {
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
  }

  // Log-normal parameterized by its median and the log-scale dispersion.
  double lognormal_median(double median, double sigma_log) {
    return std::exp(normal(std::log(median), sigma_log));
  }

  // Roulette-wheel draw over a cumulative weight vector (last entry = total).
  // Returns the index of the first bucket whose cumulative weight exceeds the
  // sampled point. Total mass must be > 0.
  size_t roulette_cumulative(std::span<const double> cum) {
    double x = next_double() * cum.back();
    size_t lo = 0, hi = cum.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (cum[mid] > x)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

// Derive an independent stream for (tag, a, b, c) under a master seed.
inline Rng derive_stream(uint64_t master, std::string_view tag, uint64_t a = 0,
                         uint64_t b = 0, uint64_t c = 0) {
  uint64_t k = mix_key(master, hash_str(tag));
  k = mix_key(k, a);
  k = mix_key(k, b);
  k = mix_key(k, c);
  return Rng(k);
}

// One-shot uniform in [0,1) for a logical key; used for per-contact and
// per-bite Bernoulli trials so paired runs draw the same variate.
inline double keyed_uniform(uint64_t master, std::string_view tag, uint64_t a,
                            uint64_t b = 0, uint64_t c = 0) {
  uint64_t k = mix_key(master, hash_str(tag));
  k = mix_key(k, a);
  k = mix_key(k, b);
  k = mix_key(k, c);
  uint64_t sm = k;
  return double(splitmix64(sm) >> 11) * 0x1.0p-53;
}

}  // namespace avsim::core
