#pragma once

#include <array>
#include <cstdint>

namespace cuckoo {

// splitmix64 finalizer. Bit-reproducible everywhere; used for seed
// derivation and as the mixing core of the seeded key hashers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Purpose tags for sub-stream derivation. Each independent consumer of
// randomness derives its own stream so parallel work is order-independent.
enum class StreamPurpose : std::uint64_t {
  trial = 1,       // one stream per Monte Carlo trial index
  table_hash = 2,  // stash-table hash seeds, index = 2*generation + {0,1}
  sweep_point = 3, // one stream per sweep point, index = n
  bench = 4,       // benchmark workload generation
  graph_gen = 5,   // random multigraph generation in tests/selftest
};

/// Master seed plus pure sub-stream derivation: equal (master, purpose,
/// index) always yields the same sub-seed, on every platform.
struct Seed {
  std::uint64_t master = 0;

  constexpr std::uint64_t substream(StreamPurpose purpose, std::uint64_t index) const noexcept {
    std::uint64_t h = mix64(master + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (static_cast<std::uint64_t>(purpose) + 0xBF58476D1CE4E5B9ULL));
    h = mix64(h ^ (index + 0x94D049BB133111EBULL));
    return h;
  }
};

/// xoshiro256** seeded via splitmix64 expansion. Implemented here (rather
/// than <random>) because std::uniform_int_distribution is not
/// bit-reproducible across standard libraries, and deterministic replay of
/// every stream is part of this library's contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      word = mix64(x);
    }
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Unbiased uniform draw from [0, bound). bound = 0 or 1 returns 0.
  /// Bitmask rejection: a power-of-two mask, redraw until in range.
  std::uint32_t uniform_below(std::uint32_t bound) noexcept {
    if (bound <= 1) return 0;
    const int bits = 32 - countl_zero32(bound - 1);
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    for (;;) {
      const auto r = static_cast<std::uint32_t>(next() & mask);
      if (r < bound) return r;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  static constexpr int countl_zero32(std::uint32_t x) noexcept {
    int n = 32;
    for (; x != 0; x >>= 1) --n;
    return n;
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace cuckoo
