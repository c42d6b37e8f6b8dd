#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cuckoo/hash_pair.hpp"
#include "cuckoo/params.hpp"
#include "cuckoo/rng.hpp"

namespace cuckoo {

/// Everything an indexer may depend on. seed1/seed2 change on every rehash
/// (fresh generation), so a seeded indexer yields fresh hash functions while
/// a table-backed one can ignore them.
struct HashContext {
  std::uint64_t seed1 = 0;
  std::uint64_t seed2 = 0;
  std::uint64_t m = 0;
  std::uint32_t generation = 0;
};

class table_full : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default indexer: scrambles the key's hash against the per-generation
/// seeds and maps to a bucket with a multiply-shift reduction.
template <class Key, class Hash = std::hash<Key>>
struct SeededIndexer {
  std::pair<std::uint32_t, std::uint32_t> operator()(const Key& key,
                                                     const HashContext& ctx) const {
    const std::uint64_t h = Hash{}(key);
    return {reduce(mix64(h ^ ctx.seed1), ctx.m), reduce(mix64(h ^ ctx.seed2), ctx.m)};
  }

  static std::uint32_t reduce(std::uint64_t x, std::uint64_t m) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(x) * m) >> 64);
  }
};

/// Replays pre-sampled hash tables for keys 0..n-1. Generations are
/// ignored, so rehashing cannot help; pair it with max_rehash_attempts = 0.
struct HashPairIndexer {
  const HashPair* pair = nullptr;
  std::pair<std::uint32_t, std::uint32_t> operator()(std::uint64_t item,
                                                     const HashContext&) const {
    return {pair->h1[item], pair->h2[item]};
  }
};

struct TableLimits {
  /// Full buckets the insert search may expand before giving up on moves.
  std::uint32_t max_eviction_expansions = 500;
  /// Rebuilds with fresh hash functions before insert throws table_full.
  std::uint32_t max_rehash_attempts = 10;
};

enum class InsertStatus { placed, placed_via_stash, rehashed, replaced };

struct InsertOutcome {
  InsertStatus status = InsertStatus::placed;
  std::uint32_t evictions = 0;       // entries moved to open up the slot
  std::uint32_t rehash_attempts = 0; // rebuilds consumed by this insert
};

struct TableStats {
  std::uint64_t items = 0;
  std::uint64_t buckets = 0;
  std::uint32_t bucket_capacity = 0;
  std::uint32_t stash_capacity = 0;
  std::uint64_t stash_occupancy = 0;
  std::uint64_t inserts = 0;
  std::uint64_t replacements = 0;
  std::uint64_t erases = 0;
  std::uint64_t evict_moves = 0;
  std::uint64_t rehash_count = 0;
  std::uint64_t probes = 0;     // cumulative entry comparisons across lookups
  std::uint64_t max_probe = 0;  // most entries any single lookup touched
  double load_factor = 0.0;     // items / (m*d); the stash is extra space
};

/// Fixed-size cuckoo table: m buckets of capacity d plus a stash of
/// capacity s. Each key may live in one of its two buckets or in the stash.
/// Inserts displace existing entries along a shortest eviction path (BFS,
/// bounded), fall back to the stash, then to rehashing; when all of that
/// fails, insert throws table_full and the table still holds exactly the
/// entries it held before the call. Lookups touch at most 2d + s entries.
template <class Key, class Value, class Indexer = SeededIndexer<Key>,
          class KeyEq = std::equal_to<Key>>
class StashTable {
 public:
  StashTable(const Params& params, Seed seed, TableLimits limits = {},
             Indexer indexer = {})
      : m_(params.m),
        d_(params.d),
        s_(params.s),
        limits_(limits),
        indexer_(std::move(indexer)),
        seed_(seed) {
    slots_.resize(m_ * d_);
    counts_.assign(m_, 0);
    mark_.assign(m_, 0);
    refresh_context();
  }

  InsertOutcome insert(const Key& key, Value value) {
    ++inserts_;
    if (Location loc = locate(key); loc.where != Where::none) {
      value_at(loc) = std::move(value);
      ++replacements_;
      return {InsertStatus::replaced, 0, 0};
    }
    Entry e{key, std::move(value)};
    std::uint32_t moves = 0;
    if (try_place(e, moves, limits_.max_eviction_expansions)) {
      ++size_;
      return {InsertStatus::placed, moves, 0};
    }
    if (stash_.size() < s_) {
      stash_.push_back(std::move(e));
      ++size_;
      return {InsertStatus::placed_via_stash, 0, 0};
    }
    if (const std::uint32_t attempt = rebuild_insert(std::move(e)); attempt > 0) {
      ++size_;
      return {InsertStatus::rehashed, 0, attempt};
    }
    throw table_full("insert failed after " +
                     std::to_string(limits_.max_rehash_attempts) +
                     " rehash attempts (" + std::to_string(size_) + " items, " +
                     std::to_string(m_) + " buckets)");
  }

  const Value* find(const Key& key) const {
    Location loc = locate(key);
    return loc.where == Where::none ? nullptr : &value_at(loc);
  }

  Value* find(const Key& key) {
    Location loc = locate(key);
    return loc.where == Where::none ? nullptr : &value_at(loc);
  }

  bool contains(const Key& key) const { return locate(key).where != Where::none; }

  bool erase(const Key& key) {
    Location loc = locate(key);
    if (loc.where == Where::none) return false;
    ++erases_;
    --size_;
    if (loc.where == Where::stash) {
      stash_.erase(stash_.begin() + static_cast<std::ptrdiff_t>(loc.stash_index));
      return true;
    }
    remove_slot(loc.bucket, loc.slot);
    promote_from_stash(loc.bucket);
    return true;
  }

  void clear() {
    counts_.assign(m_, 0);
    stash_.clear();
    size_ = 0;
  }

  /// Consistency check: every stored entry sits in one of its own buckets,
  /// capacities are respected, keys are unique, and lookup agrees with
  /// storage.
  bool audit() const {
    if (stash_.size() > s_) return false;
    std::uint64_t seen = 0;
    for (std::uint64_t b = 0; b < m_; ++b) {
      if (counts_[b] > d_) return false;
      for (std::uint32_t i = 0; i < counts_[b]; ++i) {
        const Entry& en = slots_[b * d_ + i];
        const auto [c1, c2] = indexer_(en.key, ctx_);
        if (c1 != b && c2 != b) return false;
        const Location loc = locate(en.key);
        if (loc.where != Where::bucket || loc.bucket != b || loc.slot != i)
          return false;  // duplicate key or broken lookup
        ++seen;
      }
    }
    for (std::size_t j = 0; j < stash_.size(); ++j) {
      const Location loc = locate(stash_[j].key);
      if (loc.where != Where::stash || loc.stash_index != j) return false;
      ++seen;
    }
    return seen == size_;
  }

  std::uint64_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::uint64_t bucket_count() const noexcept { return m_; }
  std::uint32_t bucket_capacity() const noexcept { return d_; }
  std::uint32_t stash_capacity() const noexcept { return s_; }
  std::uint64_t stash_size() const noexcept { return stash_.size(); }
  std::uint32_t generation() const noexcept { return generation_; }
  const HashContext& hash_context() const noexcept { return ctx_; }

  TableStats stats() const {
    TableStats st;
    st.items = size_;
    st.buckets = m_;
    st.bucket_capacity = d_;
    st.stash_capacity = s_;
    st.stash_occupancy = stash_.size();
    st.inserts = inserts_;
    st.replacements = replacements_;
    st.erases = erases_;
    st.evict_moves = evict_moves_;
    st.rehash_count = rehashes_;
    st.probes = probes_;
    st.max_probe = max_probe_;
    st.load_factor = m_ * d_ > 0 ? static_cast<double>(size_) /
                                       static_cast<double>(m_ * d_)
                                 : 0.0;
    return st;
  }

 private:
  struct Entry {
    Key key;
    Value value;
  };

  enum class Where { none, bucket, stash };
  struct Location {
    Where where = Where::none;
    std::uint64_t bucket = 0;
    std::uint32_t slot = 0;
    std::size_t stash_index = 0;
  };

  struct PathNode {
    std::uint64_t bucket;
    std::uint32_t parent;  // index into nodes_, kNoParent at the roots
    std::uint32_t slot;    // slot in the parent bucket that moves here
  };
  static constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;
  static constexpr std::uint64_t kUnbounded = ~std::uint64_t{0};

  void refresh_context() {
    const auto g = static_cast<std::uint64_t>(generation_);
    ctx_.seed1 = seed_.substream(StreamPurpose::table_hash, 2 * g);
    ctx_.seed2 = seed_.substream(StreamPurpose::table_hash, 2 * g + 1);
    ctx_.m = m_;
    ctx_.generation = generation_;
  }

  Location locate(const Key& key) const {
    const auto [b1, b2] = indexer_(key, ctx_);
    std::uint64_t touched = 0;
    auto done = [&](Location loc) {
      probes_ += touched;
      if (touched > max_probe_) max_probe_ = touched;
      return loc;
    };
    for (const std::uint64_t b : {std::uint64_t{b1}, std::uint64_t{b2}}) {
      for (std::uint32_t i = 0; i < counts_[b]; ++i) {
        ++touched;
        if (eq_(slots_[b * d_ + i].key, key)) return done({Where::bucket, b, i, 0});
      }
      if (b2 == b1) break;
    }
    for (std::size_t j = 0; j < stash_.size(); ++j) {
      ++touched;
      if (eq_(stash_[j].key, key)) return done({Where::stash, 0, 0, j});
    }
    return done({});
  }

  Value& value_at(const Location& loc) {
    return loc.where == Where::stash ? stash_[loc.stash_index].value
                                     : slots_[loc.bucket * d_ + loc.slot].value;
  }
  const Value& value_at(const Location& loc) const {
    return loc.where == Where::stash ? stash_[loc.stash_index].value
                                     : slots_[loc.bucket * d_ + loc.slot].value;
  }

  void append_entry(std::uint64_t b, Entry&& e) {
    slots_[b * d_ + counts_[b]] = std::move(e);
    ++counts_[b];
  }

  void remove_slot(std::uint64_t b, std::uint32_t slot) {
    const std::uint32_t n = counts_[b];
    for (std::uint32_t i = slot; i + 1 < n; ++i)
      slots_[b * d_ + i] = std::move(slots_[b * d_ + i + 1]);
    --counts_[b];
  }

  void promote_from_stash(std::uint64_t freed_bucket) {
    for (std::size_t j = 0; j < stash_.size(); ++j) {
      const auto [c1, c2] = indexer_(stash_[j].key, ctx_);
      if (c1 == freed_bucket || c2 == freed_bucket) {
        append_entry(freed_bucket, std::move(stash_[j]));
        stash_.erase(stash_.begin() + static_cast<std::ptrdiff_t>(j));
        return;
      }
    }
  }

  // Breadth-first search for the shortest chain of displacements ending at
  // a bucket with a free slot. The key's first bucket is expanded first, so
  // it wins all ties. On success the chain is applied and e is consumed.
  bool try_place(Entry& e, std::uint32_t& moves, std::uint64_t budget) {
    const auto [b1, b2] = indexer_(e.key, ctx_);
    ++epoch_;
    nodes_.clear();
    seed_node(b1);
    if (b2 != b1) seed_node(b2);
    std::size_t head = 0;
    std::uint64_t expanded = 0;
    while (head < nodes_.size()) {
      const auto ni = static_cast<std::uint32_t>(head++);
      const std::uint64_t b = nodes_[ni].bucket;
      if (counts_[b] < d_) {
        moves = apply_path(ni, e);
        evict_moves_ += moves;
        return true;
      }
      if (expanded++ == budget) break;
      for (std::uint32_t i = 0; i < d_; ++i) {
        const auto [c1, c2] = indexer_(slots_[b * d_ + i].key, ctx_);
        const std::uint64_t other = (c1 == b) ? c2 : c1;
        if (other == b || mark_[other] == epoch_) continue;
        mark_[other] = epoch_;
        nodes_.push_back({other, ni, i});
      }
    }
    return false;
  }

  void seed_node(std::uint64_t b) {
    mark_[b] = epoch_;
    nodes_.push_back({b, kNoParent, 0});
  }

  // Walks the found chain back to the root, moving each entry one hop; path
  // buckets are distinct, so recorded slot indices stay valid. The new
  // entry always lands in one of its own buckets (the root).
  std::uint32_t apply_path(std::uint32_t ni, Entry& e) {
    std::uint32_t moves = 0;
    std::uint32_t cur = ni;
    while (nodes_[cur].parent != kNoParent) {
      const std::uint32_t p = nodes_[cur].parent;
      const std::uint64_t pb = nodes_[p].bucket;
      const std::uint32_t slot = nodes_[cur].slot;
      append_entry(nodes_[cur].bucket, std::move(slots_[pb * d_ + slot]));
      remove_slot(pb, slot);
      ++moves;
      cur = p;
    }
    append_entry(nodes_[cur].bucket, std::move(e));
    return moves;
  }

  void gather(std::vector<Entry>& out) {
    for (std::uint64_t b = 0; b < m_; ++b) {
      for (std::uint32_t i = 0; i < counts_[b]; ++i)
        out.push_back(std::move(slots_[b * d_ + i]));
      counts_[b] = 0;
    }
    for (Entry& e : stash_) out.push_back(std::move(e));
    stash_.clear();
  }

  // Places every buffered entry at the current generation. On success the
  // buffer ends empty; on failure the table is drained and the buffer again
  // holds the whole multiset.
  bool place_buffer(std::uint64_t budget) {
    for (std::size_t i = 0; i < rebuild_buf_.size(); ++i) {
      Entry& en = rebuild_buf_[i];
      std::uint32_t moves = 0;
      if (try_place(en, moves, budget)) continue;
      if (stash_.size() < s_) {
        stash_.push_back(std::move(en));
        continue;
      }
      std::vector<Entry> rest;
      rest.reserve(rebuild_buf_.size());
      gather(rest);
      for (std::size_t j = i; j < rebuild_buf_.size(); ++j)
        rest.push_back(std::move(rebuild_buf_[j]));
      rebuild_buf_ = std::move(rest);
      return false;
    }
    rebuild_buf_.clear();
    return true;
  }

  // Rebuilds with fresh hash functions until everything (including the
  // pending entry) fits. Returns the attempt that succeeded, or 0 after the
  // budget runs out, in which case the pending entry is dropped and the old
  // contents are replayed at the old generation, where a full placement is
  // known to exist.
  std::uint32_t rebuild_insert(Entry&& pending) {
    const std::uint32_t g0 = generation_;
    const Key pending_key = pending.key;
    rebuild_buf_.clear();
    gather(rebuild_buf_);
    rebuild_buf_.push_back(std::move(pending));
    for (std::uint32_t attempt = 1; attempt <= limits_.max_rehash_attempts;
         ++attempt) {
      ++rehashes_;
      ++generation_;
      refresh_context();
      if (place_buffer(limits_.max_eviction_expansions)) return attempt;
    }
    for (std::size_t j = 0; j < rebuild_buf_.size(); ++j) {
      if (eq_(rebuild_buf_[j].key, pending_key)) {
        rebuild_buf_.erase(rebuild_buf_.begin() + static_cast<std::ptrdiff_t>(j));
        break;
      }
    }
    generation_ = g0;
    refresh_context();
    if (!place_buffer(kUnbounded))
      throw std::logic_error("stash table restore failed");
    return 0;
  }

  std::uint64_t m_;
  std::uint32_t d_;
  std::uint32_t s_;
  TableLimits limits_;
  Indexer indexer_;
  KeyEq eq_{};
  Seed seed_;
  HashContext ctx_{};
  std::uint32_t generation_ = 0;
  std::uint64_t size_ = 0;

  std::vector<Entry> slots_;          // bucket b occupies [b*d, b*d+counts_[b])
  std::vector<std::uint32_t> counts_;
  std::vector<Entry> stash_;
  std::vector<Entry> rebuild_buf_;

  std::uint64_t epoch_ = 0;
  std::vector<std::uint64_t> mark_;
  std::vector<PathNode> nodes_;

  std::uint64_t inserts_ = 0;
  std::uint64_t replacements_ = 0;
  std::uint64_t erases_ = 0;
  std::uint64_t evict_moves_ = 0;
  std::uint64_t rehashes_ = 0;
  mutable std::uint64_t probes_ = 0;
  mutable std::uint64_t max_probe_ = 0;
};

}  // namespace cuckoo
