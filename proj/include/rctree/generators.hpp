#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rctree/core.hpp"
#include "rctree/union_find.hpp"

// Seeded forest and batch generators. Same (shape, n, seed) always yields
// the same edges: randomness comes from a private mt19937_64 and all
// reductions are plain modulo, so streams never depend on library
// distribution internals.

namespace rctree {

namespace detail {

inline weight_t gen_weight(std::mt19937_64& rng) {
  return weight_t(1 + rng() % 100);
}

}  // namespace detail

// 0-1-2-...-(n-1)
inline std::vector<weighted_edge> gen_path(std::uint32_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<weighted_edge> es;
  for (vertex_id v = 0; v + 1 < n; ++v)
    es.push_back({edge_id(v, v + 1), detail::gen_weight(rng)});
  return es;
}

// forest of stars: consecutive blocks of t+1 ids, first id the hub
inline std::vector<weighted_edge> gen_star(std::uint32_t n, std::uint32_t t,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<weighted_edge> es;
  for (vertex_id hub = 0; hub < n; hub += t + 1)
    for (vertex_id leaf = hub + 1; leaf < std::min<std::uint64_t>(n, std::uint64_t(hub) + t + 1); ++leaf)
      es.push_back({edge_id(hub, leaf), detail::gen_weight(rng)});
  return es;
}

// random tree: each vertex v >= 1 attaches to a uniformly random earlier
// vertex that still has a free slot
inline std::vector<weighted_edge> gen_random_ternary(std::uint32_t n, std::uint32_t t,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<weighted_edge> es;
  if (n == 0) return es;
  std::vector<vertex_id> open{0};        // vertices with residual degree
  std::vector<std::uint32_t> deg(n, 0);
  for (vertex_id v = 1; v < n; ++v) {
    std::size_t i = rng() % open.size();
    vertex_id u = open[i];
    es.push_back({edge_id(u, v), detail::gen_weight(rng)});
    if (++deg[u] == t) {
      open[i] = open.back();
      open.pop_back();
    }
    deg[v] = 1;
    if (t > 1) open.push_back(v);
  }
  std::sort(es.begin(), es.end(),
            [](const weighted_edge& a, const weighted_edge& b) { return a.e < b.e; });
  return es;
}

// spine of n/2 vertices, remaining vertices attached as legs round-robin
// wherever the degree bound leaves room
inline std::vector<weighted_edge> gen_caterpillar(std::uint32_t n, std::uint32_t t,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<weighted_edge> es;
  if (n < 2) return es;
  vertex_id spine = std::max<vertex_id>(1, n / 2);
  std::vector<std::uint32_t> deg(n, 0);
  for (vertex_id v = 0; v + 1 < spine; ++v) {
    es.push_back({edge_id(v, v + 1), detail::gen_weight(rng)});
    ++deg[v];
    ++deg[v + 1];
  }
  vertex_id host = 0;
  for (vertex_id leg = spine; leg < n; ++leg) {
    vertex_id tried = 0;
    while (tried < spine && deg[host] >= t) {
      host = (host + 1) % spine;
      ++tried;
    }
    if (tried == spine) break;  // spine saturated; rest stay isolated
    es.push_back({edge_id(host, leg), detail::gen_weight(rng)});
    ++deg[host];
    ++deg[leg];
    host = (host + 1) % spine;
  }
  std::sort(es.begin(), es.end(),
            [](const weighted_edge& a, const weighted_edge& b) { return a.e < b.e; });
  return es;
}

// shape dispatcher used by the CLI's --gen flag
inline std::vector<weighted_edge> gen_forest(const std::string& shape, std::uint32_t n,
                                             std::uint32_t t, std::uint64_t seed) {
  if (shape == "path") return gen_path(n, seed);
  if (shape == "star") return gen_star(n, t, seed);
  if (shape == "random-ternary") return gen_random_ternary(n, t, seed);
  if (shape == "caterpillar") return gen_caterpillar(n, t, seed);
  throw error("unknown generator shape: " + shape);
}

// Random valid batch against the given forest: roughly half deletions of
// existing edges, the rest insertions that keep the result a simple
// degree-bounded forest. May return fewer than k edits when the forest has
// no room (e.g. nothing left to insert without a cycle).
inline batch_edit gen_batch(const std::vector<weighted_edge>& current,
                            forest_config cfg, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  batch_edit b;
  if (cfg.n < 2) return b;

  std::size_t want_del = std::min(current.size(), (k + rng() % 2) / 2);
  std::vector<std::size_t> idx(current.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < want_del; ++i) {
    std::size_t j = i + rng() % (idx.size() - i);
    std::swap(idx[i], idx[j]);
    b.erase.push_back(current[idx[i]].e);
  }
  std::sort(b.erase.begin(), b.erase.end());

  std::set<edge_id> present;
  std::vector<std::uint32_t> deg(cfg.n, 0);
  union_find uf(cfg.n);
  std::set<edge_id> erased(b.erase.begin(), b.erase.end());
  for (const weighted_edge& we : current) {
    if (erased.count(we.e)) continue;
    present.insert(we.e);
    ++deg[we.e.u];
    ++deg[we.e.v];
    uf.unite(we.e.u, we.e.v);
  }

  std::size_t want_ins = k - want_del;
  std::size_t attempts = 0;
  while (b.insert.size() < want_ins && attempts < 200 * k + 1000) {
    ++attempts;
    vertex_id u = vertex_id(rng() % cfg.n), v = vertex_id(rng() % cfg.n);
    if (u == v) continue;
    edge_id e(u, v);
    if (present.count(e)) continue;
    if (erased.count(e)) continue;  // an edit never inserts an id it deletes
    if (deg[u] >= cfg.t || deg[v] >= cfg.t) continue;
    if (!uf.unite(u, v)) continue;
    present.insert(e);
    ++deg[u];
    ++deg[v];
    b.insert.push_back({e, detail::gen_weight(rng)});
  }
  std::sort(b.insert.begin(), b.insert.end(),
            [](const weighted_edge& a, const weighted_edge& b2) { return a.e < b2.e; });

  // a connected, degree-saturated forest may have no room for insertions;
  // top up with extra deletions so the batch still reaches k edits
  std::size_t di = want_del;
  while (b.erase.size() + b.insert.size() < k && di < idx.size()) {
    std::size_t j = di + rng() % (idx.size() - di);
    std::swap(idx[di], idx[j]);
    b.erase.push_back(current[idx[di]].e);
    ++di;
  }
  std::sort(b.erase.begin(), b.erase.end());
  return b;
}

// `current` edited by `b`, for rebuild-equivalence checks
inline std::vector<weighted_edge> apply_edit(const std::vector<weighted_edge>& current,
                                             const batch_edit& b) {
  std::set<edge_id> erased(b.erase.begin(), b.erase.end());
  std::vector<weighted_edge> out;
  for (const weighted_edge& we : current)
    if (!erased.count(we.e)) out.push_back(we);
  out.insert(out.end(), b.insert.begin(), b.insert.end());
  std::sort(out.begin(), out.end(),
            [](const weighted_edge& a, const weighted_edge& b2) { return a.e < b2.e; });
  return out;
}

}  // namespace rctree
