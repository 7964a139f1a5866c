#pragma once

#include <cstdint>

namespace opfkit {

/// SplitMix64 generator. Small, fast, and — unlike std::mt19937 with
/// std::uniform_* — produces identical streams on every platform, which the
/// byte-for-byte dataset determinism guarantee depends on.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Independent substream for worker/sample `index` of a master seed.
  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    Rng mix(master_seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    mix.next_u64();
    return mix;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return (next_u64() >> 11) * (1.0 / 9007199254740992.0); }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
  std::uint64_t state_;
};

}  // namespace opfkit
