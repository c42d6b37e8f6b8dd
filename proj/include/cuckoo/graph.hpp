#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cuckoo/hash_pair.hpp"
#include "cuckoo/params.hpp"

namespace cuckoo {

/// Multigraph on bucket indices 0..m-1 with one edge per item. Parallel
/// edges and loops are kept as-is; edge i corresponds to item i.
struct CuckooGraph {
  std::uint64_t m = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::size_t edge_count() const noexcept { return edges.size(); }
};

inline CuckooGraph build_graph(const Params& params, const HashPair& hashes) {
  CuckooGraph g;
  g.m = params.m;
  g.edges.reserve(hashes.size());
  for (std::size_t x = 0; x < hashes.size(); ++x)
    g.edges.emplace_back(hashes.h1[x], hashes.h2[x]);
  return g;
}

/// Text format: first non-comment line is the vertex count m, each later
/// line is an edge "u v". '#' starts a comment; blank lines are skipped.
/// Throws std::runtime_error with a 1-based line number on bad input.
inline CuckooGraph parse_graph(std::istream& in, const std::string& source_name = "<stream>") {
  auto fail = [&](std::size_t line_no, const std::string& what) -> std::runtime_error {
    std::ostringstream msg;
    msg << source_name << ":" << line_no << ": " << what;
    return std::runtime_error(msg.str());
  };

  CuckooGraph g;
  bool have_m = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    if (!have_m) {
      long long m = 0;
      if (!(fields >> m)) {
        std::string stray;
        if (fields.clear(), fields.str(line), fields >> stray)
          throw fail(line_no, "expected vertex count, got '" + stray + "'");
        continue;  // blank or comment-only line before the header
      }
      if (m < 1) throw fail(line_no, "vertex count must be at least 1");
      std::string extra;
      if (fields >> extra) throw fail(line_no, "trailing text after vertex count: '" + extra + "'");
      g.m = static_cast<std::uint64_t>(m);
      have_m = true;
      continue;
    }
    long long u = 0, v = 0;
    if (!(fields >> u)) {
      std::string stray;
      if (fields.clear(), fields.str(line), fields >> stray)
        throw fail(line_no, "expected edge 'u v', got '" + stray + "'");
      continue;
    }
    if (!(fields >> v)) throw fail(line_no, "edge needs two endpoints");
    std::string extra;
    if (fields >> extra) throw fail(line_no, "trailing text after edge: '" + extra + "'");
    if (u < 0 || v < 0 || static_cast<std::uint64_t>(u) >= g.m ||
        static_cast<std::uint64_t>(v) >= g.m)
      throw fail(line_no, "endpoint out of range [0, " + std::to_string(g.m) + ")");
    g.edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
  }
  if (!have_m) throw fail(line_no, "missing vertex count line");
  return g;
}

inline void write_graph(std::ostream& out, const CuckooGraph& g) {
  out << g.m << "\n";
  for (const auto& [u, v] : g.edges) out << u << " " << v << "\n";
}

}  // namespace cuckoo
