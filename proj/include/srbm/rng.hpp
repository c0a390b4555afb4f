#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace srbm {

// Counter-based splittable generator built on the SplitMix64 finalizer:
// output i is mix64(key + i * GOLDEN). Substreams re-key deterministically
// from (key, label), so parallel trials and replayed adversaries see
// identical bits on every platform. All samplers in this project draw from
// this generator only; nothing uses std:: distributions (their output is
// implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : key_(seed) {}

  // Derived substream: an independent generator keyed by (key, label).
  Rng stream(uint64_t label) const {
    return Rng(mix64(key_ ^ mix64(label + GOLDEN)));
  }
  Rng stream(std::string_view label) const { return stream(fnv1a(label)); }

  uint64_t next_u64() { return mix64(key_ + (++counter_) * GOLDEN); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  int8_t fair_spin() { return (next_u64() & 1) ? int8_t(+1) : int8_t(-1); }

  // Uniform integer in [0, n), rejection-sampled for exactness.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Exact Poisson draw. Knuth's product method for small means; larger means
  // split by additivity into chunks of at most 30 so the exp() product stays
  // well above the subnormal range.
  int poisson(double mean) {
    if (mean <= 0) return 0;
    int total = 0;
    while (mean > 30.0) {
      total += poisson_small(30.0);
      mean -= 30.0;
    }
    return total + poisson_small(mean);
  }

  // Geometric skip length for Bernoulli(p) scans: number of failures before
  // the next success. Returns a huge sentinel when p == 0.
  uint64_t geometric_skip(double p) {
    if (p <= 0) return UINT64_MAX;
    if (p >= 1) return 0;
    double u = uniform();
    // u == 0 would send log to -inf; nudge to the smallest positive value.
    if (u <= 0) u = 0x1.0p-53;
    double s = std::floor(std::log(u) / std::log1p(-p));
    if (s >= double(UINT64_MAX)) return UINT64_MAX;
    return uint64_t(s);
  }

 private:
  static constexpr uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;

  static uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  static uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
      h ^= uint64_t(uint8_t(c));
      h *= 0x100000001b3ull;
    }
    return h;
  }

  int poisson_small(double mean) {
    const double floor_ = std::exp(-mean);
    int count = 0;
    double prod = uniform();
    while (prod > floor_) {
      ++count;
      prod *= uniform();
    }
    return count;
  }

  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace srbm
