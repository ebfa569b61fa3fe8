#pragma once

#include <cmath>
#include <cstdint>

namespace switchlab {

//============================================================================
// Deterministic pseudo-randomness (splitmix64). Every consumer derives its
// own stream from (seed, stream id, index), so draw order inside one stream
// never depends on how work elsewhere is scheduled.
//============================================================================

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return scramble(state_);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; spares are cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Stable stream key; mixes each component through the scrambler.
  static std::uint64_t key(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index = 0) {
    std::uint64_t z = scramble(seed + 0x9E3779B97F4A7C15ULL);
    z = scramble(z ^ (stream + 0xBF58476D1CE4E5B9ULL));
    return scramble(z ^ (index + 0x94D049BB133111EBULL));
  }

 private:
  static std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace switchlab
