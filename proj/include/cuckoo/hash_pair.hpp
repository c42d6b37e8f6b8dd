#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cuckoo/params.hpp"
#include "cuckoo/rng.hpp"

namespace cuckoo {

/// A pair of simulated fully-random hash functions on items 0..n-1, stored
/// as explicit draw tables. The analysis assumes ideal uniform functions;
/// a real hash function would confound the exponent measurements, so the
/// experiment harness always runs on these tables. h1[x] == h2[x] is
/// perfectly legal and shows up as a loop in the cuckoo graph.
struct HashPair {
  std::vector<std::uint32_t> h1;
  std::vector<std::uint32_t> h2;

  std::size_t size() const noexcept { return h1.size(); }
  std::pair<std::uint32_t, std::uint32_t> operator()(std::size_t item) const {
    return {h1[item], h2[item]};
  }
};

/// Fills `out` with fresh uniform draws; draw order is per item (h1 then
/// h2), which downstream code relies on for replay.
inline void sample_hash_pair_into(const Params& params, Rng& rng, HashPair& out) {
  const auto m = static_cast<std::uint32_t>(params.m);
  out.h1.resize(params.n);
  out.h2.resize(params.n);
  for (std::uint64_t x = 0; x < params.n; ++x) {
    out.h1[x] = rng.uniform_below(m);
    out.h2[x] = rng.uniform_below(m);
  }
}

inline HashPair sample_hash_pair(const Params& params, Seed seed,
                                 std::uint64_t trial_index = 0) {
  Rng rng(seed.substream(StreamPurpose::trial, trial_index));
  HashPair pair;
  sample_hash_pair_into(params, rng, pair);
  return pair;
}

}  // namespace cuckoo
