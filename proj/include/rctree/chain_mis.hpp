#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

#include "rctree/core.hpp"
#include "rctree/parallel.hpp"

// Deterministic maximal independent sets on chains (disjoint paths).
//
// Members carry globally unique ids. Colors start as those ids and are
// reduced by iterated deterministic coin tossing: every member compares its
// color with its successor under a fixed per-chain orientation (chains are
// walked from their lower-id endpoint), takes the index i of the lowest
// differing bit, and recolors itself 2*i + (own bit i). Chain sinks and
// isolated members compare against the virtual color -1. Once the palette
// is at most 6 a rank sweep recolors the classes from highest to lowest,
// each member taking the smallest color unused by its neighbors, which
// lands in {0,1,2}. The MIS sweep then admits color classes in increasing
// order. Every step is a pure function of the input graph, so the result
// is identical for any schedule or thread count.

namespace rctree {

struct chain_graph {
  // members sorted ascending; nbr[2*i], nbr[2*i+1] are member indices
  // (not ids) or npos.
  static constexpr std::uint32_t npos = std::uint32_t(-1);
  std::vector<vertex_id> members;
  std::vector<std::uint32_t> nbr;

  std::size_t size() const { return members.size(); }
  std::uint32_t degree(std::size_t i) const {
    return (nbr[2 * i] != npos) + (nbr[2 * i + 1] != npos);
  }
};

// Builds the internal indexed form from member ids and neighbor ids.
// `neighbor_ids` holds up to two entries per member (nil_vertex = none);
// ids not present as members are rejected, as is any member with more than
// two neighbors (the caller promised a chain).
inline chain_graph make_chain_graph(std::vector<vertex_id> members,
                                    std::vector<std::array<vertex_id, 2>> neighbor_ids) {
  if (!std::is_sorted(members.begin(), members.end())) {
    std::vector<std::size_t> order(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return members[a] < members[b]; });
    std::vector<vertex_id> m2(members.size());
    std::vector<std::array<vertex_id, 2>> n2(members.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      m2[i] = members[order[i]];
      n2[i] = neighbor_ids[order[i]];
    }
    members.swap(m2);
    neighbor_ids.swap(n2);
  }
  chain_graph g;
  g.members = std::move(members);
  g.nbr.assign(2 * g.members.size(), chain_graph::npos);
  auto index_of = [&](vertex_id id) -> std::uint32_t {
    auto it = std::lower_bound(g.members.begin(), g.members.end(), id);
    if (it == g.members.end() || *it != id)
      throw query_error(query_error::kind::malformed_chain,
                        "chain neighbor " + std::to_string(id) + " is not a member");
    return std::uint32_t(it - g.members.begin());
  };
  for (std::size_t i = 0; i < g.members.size(); ++i) {
    int filled = 0;
    for (int s = 0; s < 2; ++s) {
      vertex_id id = neighbor_ids[i][s];
      if (id == nil_vertex) continue;
      g.nbr[2 * i + filled++] = index_of(id);
    }
  }
  return g;
}

struct coloring {
  std::vector<std::int64_t> colors;  // parallel to members
  std::uint32_t palette = 0;         // 1 + max color (0 when empty)
};

namespace detail {

// succ[i] = member index this member compares against, npos = virtual -1.
// Orientation: each chain is walked from its lower-id endpoint; every
// member designates the next member along the walk. Every chain edge is
// covered by exactly one designation, which is what keeps the recoloring
// step proper.
inline std::vector<std::uint32_t> orient_chains(const chain_graph& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> succ(n, chain_graph::npos);
  std::vector<char> visited(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (visited[i] || g.degree(i) > 1) continue;
    // walk from this endpoint (isolated members fall out immediately)
    std::uint32_t prev = chain_graph::npos;
    std::uint32_t cur = std::uint32_t(i);
    while (true) {
      visited[cur] = 1;
      std::uint32_t a = g.nbr[2 * cur], b = g.nbr[2 * cur + 1];
      std::uint32_t next = (a != prev && a != chain_graph::npos) ? a : b;
      if (next == prev || next == chain_graph::npos) break;
      succ[cur] = next;
      prev = cur;
      cur = next;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!visited[i])
      throw query_error(query_error::kind::malformed_chain,
                        "chain graph contains a cycle");
  return succ;
}

inline std::int64_t coin_toss(std::int64_t own, std::int64_t designated) {
  std::uint64_t diff = std::uint64_t(own) ^ std::uint64_t(designated);
  assert(diff != 0 && "coloring must be proper before a toss");
  int i = std::countr_zero(diff);
  return 2 * std::int64_t(i) + ((own >> i) & 1);
}

}  // namespace detail

// Proper coloring of the chain graph with palette <= 6 (in fact <= 3 after
// the rank sweep). Deterministic in the graph alone.
inline coloring color_chains(const chain_graph& g, unsigned threads = 1) {
  const std::size_t n = g.size();
  coloring out;
  out.colors.resize(n);
  if (n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) out.colors[i] = g.members[i];
  auto succ = detail::orient_chains(g);

  auto palette_of = [&](const std::vector<std::int64_t>& c) {
    std::int64_t mx = -1;
    for (auto x : c) mx = std::max(mx, x);
    return std::uint32_t(mx + 1);
  };

  std::uint32_t palette = palette_of(out.colors);
  std::vector<std::int64_t> next(n);
  while (palette > 6) {
    parallel_for(n, threads, [&](std::size_t i) {
      std::int64_t other =
          succ[i] == chain_graph::npos ? -1 : out.colors[succ[i]];
      next[i] = detail::coin_toss(out.colors[i], other);
    });
    out.colors.swap(next);
    palette = palette_of(out.colors);
  }

  // rank sweep: highest class first, everyone takes the smallest color its
  // (at most two) neighbors do not currently hold
  for (std::int64_t c = std::int64_t(palette) - 1; c >= 0; --c) {
    parallel_for(n, threads, [&](std::size_t i) {
      if (out.colors[i] != c) return;
      std::int64_t a = -1, b = -1;
      if (g.nbr[2 * i] != chain_graph::npos) a = out.colors[g.nbr[2 * i]];
      if (g.nbr[2 * i + 1] != chain_graph::npos) b = out.colors[g.nbr[2 * i + 1]];
      std::int64_t pick = 0;
      while (pick == a || pick == b) ++pick;
      out.colors[i] = pick;
    });
  }
  out.palette = palette_of(out.colors);
  assert(out.palette <= 3);
  return out;
}

// Sequential-by-color sweep: classes in increasing color order; a member
// joins iff no neighbor joined in an earlier class. Within a class members
// are mutually non-adjacent, so the phase is safely parallel.
inline std::vector<vertex_id> mis_from_coloring(const chain_graph& g,
                                                const coloring& col,
                                                unsigned threads = 1) {
  const std::size_t n = g.size();
#ifndef NDEBUG
  for (std::size_t i = 0; i < n; ++i)
    for (int s = 0; s < 2; ++s)
      if (g.nbr[2 * i + s] != chain_graph::npos)
        assert(col.colors[i] != col.colors[g.nbr[2 * i + s]] &&
               "mis_from_coloring needs a proper coloring");
#endif
  std::vector<char> in_set(n, 0);
  for (std::int64_t c = 0; c < std::int64_t(col.palette); ++c) {
    parallel_for(n, threads, [&](std::size_t i) {
      if (col.colors[i] != c) return;
      std::uint32_t a = g.nbr[2 * i], b = g.nbr[2 * i + 1];
      if (a != chain_graph::npos && in_set[a]) return;
      if (b != chain_graph::npos && in_set[b]) return;
      in_set[i] = 1;
    });
  }
  std::vector<vertex_id> mis;
  for (std::size_t i = 0; i < n; ++i)
    if (in_set[i]) mis.push_back(g.members[i]);
  return mis;
}

inline std::vector<vertex_id> chain_mis(const chain_graph& g, unsigned threads = 1) {
  return mis_from_coloring(g, color_chains(g, threads), threads);
}

}  // namespace rctree
