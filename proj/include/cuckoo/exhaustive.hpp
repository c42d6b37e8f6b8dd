#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cuckoo/graph.hpp"
#include "cuckoo/rng.hpp"

namespace cuckoo {

/// Exhaustive checks walk 2^|E| subsets or orientations, so keep them small.
inline constexpr std::size_t kBruteForceEdgeLimit = 20;

namespace detail {
inline void require_brute_size(std::size_t edges, const char* what) {
  if (edges > kBruteForceEdgeLimit)
    throw std::invalid_argument(std::string(what) + ": graph has " +
                                std::to_string(edges) + " edges, limit is " +
                                std::to_string(kBruteForceEdgeLimit));
}
}  // namespace detail

struct SubsetWitness {
  std::int64_t deficiency = 0;
  std::vector<std::uint32_t> edges;  // item indices of the witness subset
};

/// Largest value of |X| - d*|N(X)| over subsets X of items, where N(X) is
/// the set of buckets the items in X hash to. This equals the minimum
/// overflow whenever that is positive, which makes it an independent oracle
/// for the augmenting-path solver. Ties are broken toward smaller subsets,
/// then toward the lexicographically smallest sorted index list; the empty
/// subset (value 0) wins when no subset is deficient.
inline SubsetWitness max_deficiency(const CuckooGraph& g, std::uint32_t d) {
  const std::size_t k = g.edge_count();
  detail::require_brute_size(k, "max_deficiency");

  // Relabel the touched buckets compactly so N(X) fits in one word: at most
  // 2k <= 40 distinct endpoints appear.
  std::vector<std::uint32_t> ids;
  auto id_of = [&](std::uint32_t v) -> std::size_t {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == v) return i;
    ids.push_back(v);
    return ids.size() - 1;
  };
  std::vector<std::uint64_t> vmask(k, 0);
  for (std::size_t e = 0; e < k; ++e)
    vmask[e] = (std::uint64_t{1} << id_of(g.edges[e].first)) |
               (std::uint64_t{1} << id_of(g.edges[e].second));

  std::int64_t best_def = 0;
  int best_size = 0;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    std::uint64_t nbr = 0;
    for (std::uint64_t rest = mask; rest; rest &= rest - 1)
      nbr |= vmask[static_cast<std::size_t>(std::countr_zero(rest))];
    const int size = std::popcount(mask);
    const std::int64_t def =
        size - static_cast<std::int64_t>(d) * std::popcount(nbr);
    bool better = def > best_def || (def == best_def && size < best_size);
    if (!better && def == best_def && size == best_size) {
      // lexicographic order on the sorted index lists: the set owning the
      // lowest index where they differ comes first
      const std::uint64_t diff = mask ^ best_mask;
      better = (mask & (diff & (~diff + 1))) != 0;
    }
    if (better) {
      best_def = def;
      best_size = size;
      best_mask = mask;
    }
  }

  SubsetWitness w;
  w.deficiency = best_def;
  for (std::uint64_t rest = best_mask; rest; rest &= rest - 1)
    w.edges.push_back(static_cast<std::uint32_t>(std::countr_zero(rest)));
  return w;
}

struct SubsetCondition {
  bool holds = true;
  /// When the condition fails: the maximizing subset (same tie-breaking as
  /// max_deficiency), which necessarily violates d*|N(X)| + s >= |X|.
  SubsetWitness violator;
};

/// The combinatorial characterization: a graph can be oriented with at most
/// s leftovers iff no item subset is more than s short of bucket capacity.
inline SubsetCondition subset_condition(const CuckooGraph& g, std::uint32_t d,
                                        std::uint32_t s) {
  SubsetCondition res;
  SubsetWitness w = max_deficiency(g, d);
  res.holds = w.deficiency <= static_cast<std::int64_t>(s);
  if (!res.holds) res.violator = std::move(w);
  return res;
}

inline bool subset_condition_holds(const CuckooGraph& g, std::uint32_t d,
                                   std::uint32_t s) {
  return subset_condition(g, d, s).holds;
}

/// Minimum overflow by trying all 2^|E| full orientations directly; the
/// overflow of a full orientation is the total bucket excess. Gray-code
/// order keeps each step O(1).
inline std::uint64_t min_overflow_brute(const CuckooGraph& g, std::uint32_t d) {
  const std::size_t k = g.edge_count();
  detail::require_brute_size(k, "min_overflow_brute");

  std::vector<std::uint32_t> loads(g.m, 0);
  std::uint64_t excess = 0;
  auto add = [&](std::uint32_t v) {
    if (++loads[v] > d) ++excess;
  };
  auto remove = [&](std::uint32_t v) {
    if (loads[v]-- > d) --excess;
  };
  // Bit e clear: edge e sits at its first endpoint; set: at its second.
  for (const auto& [u, v] : g.edges) {
    (void)v;
    add(u);
  }
  std::uint64_t best = excess;
  std::uint64_t state = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << k); ++i) {
    const auto e = static_cast<std::size_t>(std::countr_zero(i));
    const auto& [u, v] = g.edges[e];
    if (state >> e & 1) {
      remove(v);
      add(u);
    } else {
      remove(u);
      add(v);
    }
    state ^= std::uint64_t{1} << e;
    if (excess < best) best = excess;
  }
  return best;
}

/// Calls fn once per multigraph on m buckets with exactly num_edges edges,
/// counting loops and parallel edges, up to edge order (edges are emitted in
/// nondecreasing endpoint-pair order).
template <typename Fn>
void for_each_multigraph(std::uint64_t m, std::size_t num_edges, Fn&& fn) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> types;
  for (std::uint32_t u = 0; u < m; ++u)
    for (std::uint32_t v = u; v < m; ++v) types.emplace_back(u, v);

  CuckooGraph g;
  g.m = m;
  g.edges.resize(num_edges);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t min_type) -> void {
    if (pos == num_edges) {
      fn(static_cast<const CuckooGraph&>(g));
      return;
    }
    for (std::size_t t = min_type; t < types.size(); ++t) {
      g.edges[pos] = types[t];
      self(self, pos + 1, t);
    }
  };
  rec(rec, 0, 0);
}

/// Uniform multigraph with independent uniform endpoints per edge, the same
/// distribution a hash pair induces.
inline CuckooGraph random_multigraph(std::uint64_t m, std::size_t num_edges,
                                     Rng& rng) {
  CuckooGraph g;
  g.m = m;
  g.edges.reserve(num_edges);
  for (std::size_t e = 0; e < num_edges; ++e) {
    const auto u = static_cast<std::uint32_t>(rng.uniform_below(m));
    const auto v = static_cast<std::uint32_t>(rng.uniform_below(m));
    g.edges.emplace_back(u, v);
  }
  return g;
}

}  // namespace cuckoo
