#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cuckoo/graph.hpp"

namespace cuckoo {

/// Assignment slot meaning "this item is stashed, not in a bucket".
inline constexpr std::uint32_t kStash = 0xFFFFFFFFu;

struct OverflowResult {
  std::uint64_t overflow = 0;
  /// Per edge: the bucket it was oriented to, or kStash.
  std::vector<std::uint32_t> assignment;
};

/// Incremental solver for capacity-d orientations. Edges are offered one at
/// a time; each is either placed (possibly relocating earlier edges along an
/// augmenting path) or rejected for good. The number of rejected edges after
/// all insertions equals the minimum possible overflow of the whole graph,
/// and it never decreases as more edges arrive, so suitability checks can
/// stop early once the rejection count exceeds the stash size.
class OrientationSolver {
 public:
  void reset(std::uint64_t m, std::uint32_t d, std::size_t expected_edges = 0) {
    m_ = m;
    d_ = d;
    loads_.assign(m, 0);
    if (slot_edges_.size() < m * d) slot_edges_.resize(m * d);
    if (mark_.size() < m) {
      mark_.resize(m, 0);
      pred_edge_.resize(m);
      pred_vertex_.resize(m);
    }
    edges_.clear();
    owner_.clear();
    edges_.reserve(expected_edges);
    owner_.reserve(expected_edges);
    overflow_ = 0;
  }

  /// Returns true if the edge was placed, false if it overflows.
  bool add_edge(std::uint32_t u, std::uint32_t v) {
    const auto e = static_cast<std::uint32_t>(edges_.size());
    edges_.emplace_back(u, v);
    owner_.push_back(kStash);
    if (d_ > 0 && augment(e)) return true;
    ++overflow_;
    return false;
  }

  std::uint64_t overflow() const noexcept { return overflow_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::uint32_t owner_of(std::size_t edge) const { return owner_[edge]; }
  std::uint32_t load_of(std::uint64_t bucket) const { return loads_[bucket]; }
  const std::vector<std::uint32_t>& owners() const noexcept { return owner_; }

 private:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  bool augment(std::uint32_t e) {
    ++epoch_;
    queue_.clear();
    std::size_t head = 0;
    const auto [u, v] = edges_[e];
    const std::uint32_t lo = std::min(u, v);
    const std::uint32_t hi = std::max(u, v);
    visit(lo, e, kNone);
    if (hi != lo) visit(hi, e, kNone);
    while (head < queue_.size()) {
      const std::uint32_t w = queue_[head++];
      if (loads_[w] < d_) {
        apply_path(w);
        return true;
      }
      const std::uint32_t* slot = &slot_edges_[static_cast<std::size_t>(w) * d_];
      for (std::uint32_t i = 0; i < d_; ++i) {
        const std::uint32_t f = slot[i];
        const auto [a, b] = edges_[f];
        const std::uint32_t o = (a == w) ? b : a;
        if (o == w) continue;  // a loop pinned at w frees nothing by flipping
        visit(o, f, w);
      }
    }
    return false;
  }

  void visit(std::uint32_t w, std::uint32_t via_edge, std::uint32_t from) {
    if (mark_[w] == epoch_) return;
    mark_[w] = epoch_;
    pred_edge_[w] = via_edge;
    pred_vertex_[w] = from;
    queue_.push_back(w);
  }

  // Walks the predecessor chain from the free vertex back to the new edge,
  // shifting every edge on the path to its other endpoint.
  void apply_path(std::uint32_t w) {
    while (true) {
      const std::uint32_t f = pred_edge_[w];
      const std::uint32_t pv = pred_vertex_[w];
      if (pv != kNone) unplace(f, pv);
      place(f, w);
      if (pv == kNone) return;
      w = pv;
    }
  }

  // Bucket slots are kept sorted by edge index so search order, and with it
  // the reported assignment, is a pure function of the input.
  void place(std::uint32_t e, std::uint32_t w) {
    std::uint32_t* slot = &slot_edges_[static_cast<std::size_t>(w) * d_];
    std::uint32_t i = loads_[w];
    for (; i > 0 && slot[i - 1] > e; --i) slot[i] = slot[i - 1];
    slot[i] = e;
    ++loads_[w];
    owner_[e] = w;
  }

  void unplace(std::uint32_t e, std::uint32_t w) {
    std::uint32_t* slot = &slot_edges_[static_cast<std::size_t>(w) * d_];
    const std::uint32_t n = loads_[w];
    std::uint32_t i = 0;
    while (slot[i] != e) ++i;
    for (; i + 1 < n; ++i) slot[i] = slot[i + 1];
    --loads_[w];
  }

  std::uint64_t m_ = 0;
  std::uint32_t d_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t epoch_ = 0;
  std::vector<std::uint32_t> loads_;
  std::vector<std::uint32_t> slot_edges_;
  std::vector<std::uint64_t> mark_;
  std::vector<std::uint32_t> pred_edge_;
  std::vector<std::uint32_t> pred_vertex_;
  std::vector<std::uint32_t> queue_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::vector<std::uint32_t> owner_;
};

/// Minimum number of edges that must stay unoriented when every bucket can
/// absorb at most d edges, plus one witness orientation achieving it.
inline OverflowResult min_overflow(const CuckooGraph& g, std::uint32_t d,
                                   OrientationSolver& scratch) {
  scratch.reset(g.m, d, g.edge_count());
  for (const auto& [u, v] : g.edges) scratch.add_edge(u, v);
  return {scratch.overflow(), scratch.owners()};
}

inline OverflowResult min_overflow(const CuckooGraph& g, std::uint32_t d) {
  OrientationSolver scratch;
  return min_overflow(g, d, scratch);
}

/// True when the graph admits an orientation with at most s leftovers.
inline bool is_suitable(const CuckooGraph& g, std::uint32_t d, std::uint32_t s,
                        OrientationSolver& scratch) {
  scratch.reset(g.m, d, g.edge_count());
  for (const auto& [u, v] : g.edges)
    if (!scratch.add_edge(u, v) && scratch.overflow() > s) return false;
  return true;
}

inline bool is_suitable(const CuckooGraph& g, std::uint32_t d, std::uint32_t s) {
  OrientationSolver scratch;
  return is_suitable(g, d, s, scratch);
}

/// Checks that an assignment is a legal witness: every edge sits at one of
/// its own endpoints or in the stash, no bucket holds more than d edges, and
/// at most s edges are stashed.
inline bool audit_assignment(const CuckooGraph& g, std::uint32_t d, std::uint32_t s,
                             const std::vector<std::uint32_t>& assignment) {
  if (assignment.size() != g.edge_count()) return false;
  std::vector<std::uint32_t> loads(g.m, 0);
  std::uint64_t stashed = 0;
  for (std::size_t e = 0; e < assignment.size(); ++e) {
    const std::uint32_t w = assignment[e];
    if (w == kStash) {
      ++stashed;
      continue;
    }
    if (w != g.edges[e].first && w != g.edges[e].second) return false;
    if (++loads[w] > d) return false;
  }
  return stashed <= s;
}

}  // namespace cuckoo
