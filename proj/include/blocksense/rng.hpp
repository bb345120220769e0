#pragma once

#include <cmath>
#include <cstdint>

// Counter-based pseudo-random generator used everywhere in this project.
//
// The engine is SplitMix64: the state advances by a fixed odd increment and
// each output is a bijective hash of the state, so draw i is a pure function
// of (seed, stream, i).  Independent streams are derived by hashing a
// (seed, stream id) pair into both the starting counter and the increment.
// Monte Carlo drivers hand every trial its own stream, which makes results
// identical for a fixed seed no matter how trials are scheduled across
// threads.

namespace blocksense {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Identifies one reproducible stream of draws.  Value type, cheap to copy.
struct RngHandle {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  // Deterministic sub-stream derivation, e.g. per trial index and phase.
  RngHandle derive(std::uint64_t a, std::uint64_t b = 0) const {
    RngHandle h;
    h.seed = seed;
    h.stream = mix64(stream + kGolden) ^ mix64(a + 0x8e9d5aab8a1bb4d9ull) ^
               (mix64(b + 0x5851f42d4c957f2dull) >> 1);
    return h;
  }
};

class Rng {
 public:
  explicit Rng(RngHandle h)
      : state_(mix64(h.seed + kGolden) + mix64(h.stream + 0x6a09e667f3bcc909ull)),
        inc_(mix64(h.seed ^ mix64(h.stream + 0xbb67ae8584caa73bull)) | 1ull) {}

  std::uint64_t next_u64() {
    state_ += inc_;
    return mix64(state_);
  }

  // Uniform on [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.  Always consumes exactly two words and
  // keeps no cached half, so the draw sequence is easy to reason about.
  double normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Unbiased uniform draw from {0, 1, ..., n-1}.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t reject = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= reject) return r % n;
    }
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace blocksense
