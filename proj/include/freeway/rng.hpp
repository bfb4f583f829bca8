#pragma once

#include <cstdint>

namespace freeway {

// SplitMix64: a counter-based 64-bit generator with a closed-form split.
//
// The i-th raw output of a generator seeded with `s` is mix(s + (i+1)*kGamma),
// so split(s, i) == the (i+1)-th output of SplitMix64(s). Child streams are
// derived by documented split indexes (see README, "Randomness"):
//   split(master, 0)      network initialization stream
//   split(master, 1)      agent stream (exploration draws, replay sampling)
//   split(master, 2 + e)  scenario stream of episode e
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). Defined as floor(next_double() * n).
  int next_below(int n) {
    const int k = static_cast<int>(next_double() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  static uint64_t split(uint64_t seed, uint64_t index) {
    return mix(seed + (index + 1) * kGamma);
  }

  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

 private:
  uint64_t state_;
};

// Documented stream indexes for deriving child seeds from a run's master seed.
namespace stream {
inline constexpr uint64_t kNetworkInit = 0;
inline constexpr uint64_t kAgent = 1;
inline constexpr uint64_t kEpisodeBase = 2;  // episode e uses kEpisodeBase + e

inline uint64_t episode_seed(uint64_t master, uint64_t episode) {
  return SplitMix64::split(master, kEpisodeBase + episode);
}
}  // namespace stream

}  // namespace freeway
