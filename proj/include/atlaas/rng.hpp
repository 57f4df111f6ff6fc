#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace atlaas {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless mix of up to four words; used for counter-based draws
/// (simhash hyperplanes) that must be pure functions of their inputs.
inline uint64_t mix64(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
  uint64_t s = a;
  uint64_t h = splitmix64(s);
  s ^= b + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= c + 0xc2b2ae3d27d4eb4fULL;
  h ^= splitmix64(s);
  s ^= d + 0x165667b19e3779f9ULL;
  h ^= splitmix64(s);
  return h;
}

/// Deterministic RNG with platform-independent draws. std::mt19937 engines
/// are portable but the standard distributions are not; everything here is
/// pinned so simulation output depends only on (seed, event order).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ^ 0x5DEECE66DULL) {
    // avoid the all-zero fixed point and decorrelate small seeds
    next_u64();
    next_u64();
  }

  uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, bound). bound = 0 is invalid.
  uint64_t uniform_u64(uint64_t bound) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// Uniform integer in [lo, hi], inclusive.
  uint64_t uniform_int(uint64_t lo, uint64_t hi) {
    return lo + uniform_u64(hi - lo + 1);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Knuth's product method; mean is small in all our uses (churn rates).
  uint32_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    double prod = 1.0;
    uint32_t n = 0;
    do {
      prod *= uniform01();
      if (prod <= limit) break;
      ++n;
    } while (n < 1000000);
    return n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_u64(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

} // namespace atlaas
