#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "rctree/chain_mis.hpp"
#include "rctree/cluster.hpp"
#include "rctree/core.hpp"
#include "rctree/parallel.hpp"
#include "rctree/union_find.hpp"

// Maximal tree contraction and the per-round record it leaves behind.
//
// Round 0 is the input forest, each vertex owning t adjacency slots. Every
// round, each vertex of degree one or two is eligible; a deterministic MIS
// over the eligible-induced chains contracts (rake for degree one, compress
// for degree two), isolated vertices finalize into root clusters, and the
// survivors' slots are rewritten by a pure per-slot rule for the next round.
// The full sequence of rounds is kept: the batch update engine edits it in
// place, and queries climb the cluster forest it produced.

namespace rctree {

enum class slot_tag : std::uint8_t { empty, edge, binary, unary };

// One adjacency slot. For `edge` the handle names a base cluster; for
// `binary`/`unary` a composite standing in for a contracted neighbor.
struct slot {
  slot_tag tag = slot_tag::empty;
  cluster_handle h = nil_cluster;

  bool counts_degree() const { return tag == slot_tag::edge || tag == slot_tag::binary; }
  friend bool operator==(const slot&, const slot&) = default;
};

inline int row_degree(std::span<const slot> row) {
  int d = 0;
  for (const slot& s : row) d += s.counts_degree();
  return d;
}

// Adjacency rows of one round, t slots per live vertex. Rows live in a flat
// arena; erasing frees the row for reuse. Handing out spans means insert()
// can invalidate earlier spans, so callers re-fetch after bulk insertion.
class round_rows {
 public:
  round_rows() = default;
  explicit round_rows(std::uint32_t slots_per_row) : t_(slots_per_row) {}

  std::uint32_t slots_per_row() const { return t_; }
  std::size_t size() const { return index_.size(); }
  bool contains(vertex_id v) const { return index_.find(v) != index_.end(); }

  std::span<const slot> row(vertex_id v) const {
    auto it = index_.find(v);
    assert(it != index_.end());
    return {arena_.data() + std::size_t(it->second) * t_, t_};
  }
  std::span<slot> row(vertex_id v) {
    auto it = index_.find(v);
    assert(it != index_.end());
    return {arena_.data() + std::size_t(it->second) * t_, t_};
  }

  std::span<slot> insert(vertex_id v) {
    assert(!contains(v));
    std::uint32_t r;
    if (!free_.empty()) {
      r = free_.back();
      free_.pop_back();
    } else {
      r = std::uint32_t(arena_.size() / t_);
      arena_.resize(arena_.size() + t_);
    }
    index_.emplace(v, r);
    std::span<slot> s{arena_.data() + std::size_t(r) * t_, t_};
    std::fill(s.begin(), s.end(), slot{});
    return s;
  }

  void erase(vertex_id v) {
    auto it = index_.find(v);
    assert(it != index_.end());
    free_.push_back(it->second);
    index_.erase(it);
  }

  std::vector<vertex_id> vertices_sorted() const {
    std::vector<vertex_id> vs;
    vs.reserve(index_.size());
    for (const auto& [v, r] : index_) vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    return vs;
  }

 private:
  std::uint32_t t_ = 3;
  std::unordered_map<vertex_id, std::uint32_t> index_;
  std::vector<slot> arena_;
  std::vector<std::uint32_t> free_;
};

// Everything a build leaves behind: the round-by-round adjacency rows, the
// per-vertex contraction decisions, and the cluster forest. Batch updates
// patch this structure in place.
template <cluster_algebra A>
struct contraction_record {
  using algebra_type = A;
  using value_type = typename A::value;

  forest_config cfg;
  A algebra{};
  std::vector<round_rows> rounds;
  std::vector<std::int32_t> contract_round;    // -1 until the vertex contracts
  std::vector<action_kind> action;
  std::vector<cluster_handle> vertex_cluster;  // composite keyed by the vertex
  cluster_store<value_type> clusters;
  std::map<edge_id, cluster_handle> edge_base;  // live base clusters

  std::size_t round_count() const { return rounds.size(); }

  bool alive_at(vertex_id v, std::size_t r) const {
    return r < rounds.size() && rounds[r].contains(v);
  }

  // vertex on the far side of an edge/binary slot owned by v
  vertex_id slot_neighbor(vertex_id v, const slot& s) const {
    switch (s.tag) {
      case slot_tag::edge: return clusters[s.h].edge.other(v);
      case slot_tag::binary: return clusters[s.h].other_boundary(v);
      default: return nil_vertex;
    }
  }

  cluster_handle root_of(vertex_id v) const {
    cluster_handle h = vertex_cluster[v];
    while (clusters[h].parent != nil_cluster) h = clusters[h].parent;
    return h;
  }
};

// Rejects anything that is not a forest on vertices [0, n) with max degree t.
// Scans in input order so the error names the first offending edge.
inline void validate_forest(const std::vector<weighted_edge>& edges,
                            const forest_config& cfg) {
  union_find uf(cfg.n);
  std::vector<std::uint32_t> deg(cfg.n, 0);
  std::set<edge_id> seen;
  for (const weighted_edge& we : edges) {
    const edge_id e = we.e;
    if (e.u >= cfg.n || e.v >= cfg.n)
      throw error("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                  ") endpoint out of range [0," + std::to_string(cfg.n) + ")");
    if (!seen.insert(e).second)
      throw validation_error(validation_error::kind::duplicate_edge, e,
                             "duplicate edge (" + std::to_string(e.u) + "," +
                                 std::to_string(e.v) + ")");
    if (++deg[e.u] > cfg.t || ++deg[e.v] > cfg.t)
      throw validation_error(validation_error::kind::degree_overflow, e,
                             "degree bound t=" + std::to_string(cfg.t) +
                                 " exceeded at edge (" + std::to_string(e.u) +
                                 "," + std::to_string(e.v) + ")");
    if (e.u == e.v || !uf.unite(e.u, e.v))
      throw validation_error(validation_error::kind::cycle, e,
                             "edge (" + std::to_string(e.u) + "," +
                                 std::to_string(e.v) + ") closes a cycle");
  }
}

namespace detail {

inline slot* first_empty(std::span<slot> row) {
  for (slot& s : row)
    if (s.tag == slot_tag::empty) return &s;
  return nullptr;
}

// Recompute a cluster's value from its children. Structure (children,
// spine, boundary) is taken as already correct; only the value changes.
template <cluster_algebra A>
void recompute_value(contraction_record<A>& R, cluster_handle h) {
  using V = typename A::value;
  cluster<V>& c = R.clusters[h];
  if (c.kind == cluster_kind::base) {
    c.value = R.algebra.edge_value(c.edge, c.edge_weight);
    return;
  }
  std::vector<V> unaries;
  for (cluster_handle k : c.children)
    if (k != c.spine_child[0] && k != c.spine_child[1])
      unaries.push_back(R.clusters[k].value);
  std::span<const V> us{unaries};
  switch (c.kind) {
    case cluster_kind::unary:
      c.value = R.algebra.rake_combine(R.clusters[c.spine_child[0]].value, us,
                                       c.rep, c.boundary[0]);
      break;
    case cluster_kind::binary:
      c.value = R.algebra.compress_combine(R.clusters[c.spine_child[0]].value,
                                           R.clusters[c.spine_child[1]].value,
                                           us, c.rep, c.boundary[0], c.boundary[1]);
      break;
    default:
      c.value = R.algebra.root_combine(us, c.rep);
      break;
  }
}

// Builds the composite cluster for v contracting at `round` with the given
// row, links children to it, and records the per-vertex decision.
template <cluster_algebra A>
cluster_handle make_composite(contraction_record<A>& R, vertex_id v,
                              action_kind act, std::span<const slot> row,
                              std::int32_t round) {
  using V = typename A::value;
  cluster<V> c;
  c.kind = kind_of(act);
  c.rep = v;
  c.height = round + 1;
  int spine = 0;
  for (const slot& s : row) {
    if (s.tag == slot_tag::empty) continue;
    c.children.push_back(s.h);
    if (s.counts_degree()) {
      assert(spine < 2);
      c.spine_child[spine] = s.h;
      c.boundary[spine] = R.slot_neighbor(v, s);
      ++spine;
    }
  }
  assert((act == action_kind::rake && spine == 1) ||
         (act == action_kind::compress && spine == 2) ||
         (act == action_kind::finalize && spine == 0));
  if (act == action_kind::compress)
    c.spine_hops = R.clusters[c.spine_child[0]].spine_hops +
                   R.clusters[c.spine_child[1]].spine_hops;
  cluster_handle h = R.clusters.add(std::move(c));
  for (cluster_handle k : R.clusters[h].children) R.clusters[k].parent = h;
  recompute_value(R, h);
  R.contract_round[v] = round;
  R.action[v] = act;
  R.vertex_cluster[v] = h;
  return h;
}

// The pure slot rule: an edge/binary slot whose far vertex contracted this
// round is replaced by that vertex's new cluster (unary if it raked, binary
// if it compressed); everything else copies forward unchanged. `decide`
// maps a vertex to its contraction this round, or nullopt.
template <typename Value, typename Decide>
slot next_slot(const cluster_store<Value>& cs, vertex_id v, const slot& s,
               Decide&& decide) {
  if (!s.counts_degree()) return s;
  vertex_id w = s.tag == slot_tag::edge ? cs[s.h].edge.other(v)
                                        : cs[s.h].other_boundary(v);
  std::optional<std::pair<action_kind, cluster_handle>> d = decide(w);
  if (!d) return s;
  assert(d->first == action_kind::rake || d->first == action_kind::compress);
  return slot{d->first == action_kind::rake ? slot_tag::unary : slot_tag::binary,
              d->second};
}

struct round_decisions {
  std::vector<vertex_id> finalize;  // sorted; degree-0 vertices
  std::vector<vertex_id> chosen;    // sorted; MIS over eligible chains
};

// Static-build decision rule: finalize isolates, run the chain MIS over all
// degree-1/2 vertices. `mask` is an n-sized scratch array, zero on entry
// and on exit.
template <cluster_algebra A>
round_decisions decide_round(const contraction_record<A>& R, const round_rows& cur,
                             const std::vector<vertex_id>& live,
                             std::vector<char>& mask, unsigned threads) {
  std::vector<int> deg(live.size());
  parallel_for(live.size(), threads,
               [&](std::size_t i) { deg[i] = row_degree(cur.row(live[i])); });

  round_decisions d;
  std::vector<vertex_id> members;
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (deg[i] == 0)
      d.finalize.push_back(live[i]);
    else if (deg[i] <= 2)
      members.push_back(live[i]);
  }
  for (vertex_id m : members) mask[m] = 1;

  std::vector<std::array<vertex_id, 2>> nbrs(members.size(),
                                             {nil_vertex, nil_vertex});
  parallel_for(members.size(), threads, [&](std::size_t i) {
    int k = 0;
    for (const slot& s : cur.row(members[i])) {
      if (!s.counts_degree()) continue;
      vertex_id w = R.slot_neighbor(members[i], s);
      if (mask[w]) nbrs[i][k++] = w;
    }
  });

  chain_graph g = make_chain_graph(std::move(members), std::move(nbrs));
  d.chosen = chain_mis(g, threads);

#ifndef NDEBUG
  {
    // chosen is independent and dominates the eligible set
    std::vector<char> in(g.size(), 0);
    std::size_t j = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (j < d.chosen.size() && g.members[i] == d.chosen[j]) in[i] = 1, ++j;
    for (std::size_t i = 0; i < g.size(); ++i) {
      bool covered = in[i] != 0;
      for (int s = 0; s < 2; ++s) {
        std::uint32_t nb = g.nbr[2 * i + s];
        if (nb == chain_graph::npos) continue;
        assert(!(in[i] && in[nb]) && "contraction set must be independent");
        covered = covered || in[nb];
      }
      assert(covered && "contraction set must be maximal");
    }
  }
#endif

  for (vertex_id m : g.members) mask[m] = 0;
  return d;
}

// Applies one round's decisions: builds clusters in ascending vertex order,
// then writes the survivors' next-round rows. Returns the survivors.
// `chosen` may be any independent eligible set, not only a maximal one.
template <cluster_algebra A>
std::vector<vertex_id> apply_round(contraction_record<A>& R, std::int32_t r,
                                   const round_decisions& d,
                                   const std::vector<vertex_id>& live,
                                   unsigned threads) {
  std::vector<vertex_id> contracting(d.finalize.size() + d.chosen.size());
  std::merge(d.finalize.begin(), d.finalize.end(), d.chosen.begin(),
             d.chosen.end(), contracting.begin());

  for (vertex_id v : contracting) {
    std::span<const slot> row = R.rounds[r].row(v);
    int deg = row_degree(row);
    action_kind act = deg == 0   ? action_kind::finalize
                      : deg == 1 ? action_kind::rake
                                 : action_kind::compress;
    make_composite(R, v, act, row, r);
  }

  std::vector<vertex_id> survivors;
  survivors.reserve(live.size() - contracting.size());
  std::set_difference(live.begin(), live.end(), contracting.begin(),
                      contracting.end(), std::back_inserter(survivors));
  if (survivors.empty()) return survivors;

  R.rounds.emplace_back(R.cfg.t);
  round_rows& cur = R.rounds[r];
  round_rows& nxt = R.rounds[r + 1];
  for (vertex_id v : survivors) nxt.insert(v);
  auto decide = [&](vertex_id w)
      -> std::optional<std::pair<action_kind, cluster_handle>> {
    if (R.contract_round[w] != r) return std::nullopt;
    return std::pair{R.action[w], R.vertex_cluster[w]};
  };
  parallel_for(survivors.size(), threads, [&](std::size_t i) {
    vertex_id v = survivors[i];
    std::span<const slot> src = cur.row(v);
    std::span<slot> dst = nxt.row(v);
    for (std::uint32_t j = 0; j < R.cfg.t; ++j)
      dst[j] = next_slot(R.clusters, v, src[j], decide);
  });
  return survivors;
}

// Round-0 rows and base clusters. Edges are laid down in canonical sorted
// order so identical forests produce identical records.
template <cluster_algebra A>
std::vector<weighted_edge> init_record(contraction_record<A>& R,
                                       std::vector<weighted_edge> edges,
                                       const forest_config& cfg, const A& algebra) {
  validate_forest(edges, cfg);
  std::sort(edges.begin(), edges.end(),
            [](const weighted_edge& a, const weighted_edge& b) { return a.e < b.e; });
  R.cfg = cfg;
  R.algebra = algebra;
  R.contract_round.assign(cfg.n, -1);
  R.action.assign(cfg.n, action_kind::none);
  R.vertex_cluster.assign(cfg.n, nil_cluster);
  if (cfg.n == 0) return edges;
  R.rounds.emplace_back(cfg.t);
  for (vertex_id v = 0; v < cfg.n; ++v) R.rounds[0].insert(v);
  for (const weighted_edge& we : edges) {
    cluster<typename A::value> b;
    b.kind = cluster_kind::base;
    b.edge = we.e;
    b.edge_weight = we.w;
    b.boundary = {we.e.u, we.e.v};
    b.spine_hops = 1;
    b.value = algebra.edge_value(we.e, we.w);
    cluster_handle h = R.clusters.add(std::move(b));
    R.edge_base.emplace(we.e, h);
    slot* su = first_empty(R.rounds[0].row(we.e.u));
    slot* sv = first_empty(R.rounds[0].row(we.e.v));
    assert(su && sv);  // validate_forest bounded the degrees
    *su = slot{slot_tag::edge, h};
    *sv = slot{slot_tag::edge, h};
  }
  return edges;
}

}  // namespace detail

// Runs maximal contraction to completion, one round at a time, recompacting
// the live list every round.
template <cluster_algebra A>
contraction_record<A> build_static(std::vector<weighted_edge> edges,
                                   forest_config cfg, A algebra = {},
                                   unsigned threads = 1) {
  contraction_record<A> R;
  detail::init_record(R, std::move(edges), cfg, algebra);
  std::vector<vertex_id> live(cfg.n);
  std::iota(live.begin(), live.end(), 0);
  std::vector<char> mask(cfg.n, 0);
  for (std::int32_t r = 0; !live.empty(); ++r) {
    detail::round_decisions d =
        detail::decide_round(R, R.rounds[r], live, mask, threads);
    live = detail::apply_round(R, r, d, live, threads);
  }
  assert(R.rounds.size() <= ceil_log_6_5((long double)std::max<std::uint32_t>(cfg.n, 1)) + 1);
  return R;
}

// Same decisions, two-phase scheduling: the first ⌈log_{6/5} log2 n⌉ rounds
// keep the live set in per-group lists (groups of ⌈log2 n⌉ consecutive ids)
// filtered exactly each round; after that the survivor pool is scanned as-is
// with no further compaction. Output is bit-identical to build_static.
template <cluster_algebra A>
contraction_record<A> build_static_phased(std::vector<weighted_edge> edges,
                                          forest_config cfg, A algebra = {},
                                          unsigned threads = 1) {
  contraction_record<A> R;
  detail::init_record(R, std::move(edges), cfg, algebra);
  const std::uint32_t n = cfg.n;
  if (n == 0) return R;

  const std::uint32_t phase_one =
      n <= 4 ? 0 : ceil_log_6_5(std::log2((long double)n));
  const std::uint32_t group_width = std::max<std::uint32_t>(
      1, std::uint32_t(std::ceil(std::log2((long double)n))));
  std::vector<std::vector<vertex_id>> groups((n + group_width - 1) / group_width);
  for (vertex_id v = 0; v < n; ++v) groups[v / group_width].push_back(v);

  std::vector<char> mask(n, 0);
  std::int32_t r = 0;
  auto run_round = [&](const std::vector<vertex_id>& live) {
    detail::round_decisions d =
        detail::decide_round(R, R.rounds[r], live, mask, threads);
    detail::apply_round(R, r, d, live, threads);
    ++r;
  };

  std::vector<vertex_id> live;
  for (std::uint32_t i = 0; i < phase_one; ++i) {
    live.clear();
    for (const auto& g : groups) live.insert(live.end(), g.begin(), g.end());
    if (live.empty()) break;
    run_round(live);
    parallel_for(groups.size(), threads, [&](std::size_t gi) {
      auto& g = groups[gi];
      g.erase(std::remove_if(g.begin(), g.end(),
                             [&](vertex_id v) { return R.contract_round[v] >= 0; }),
              g.end());
    });
  }

  // survivor pool, never recompacted from here on
  std::vector<vertex_id> pool;
  for (const auto& g : groups) pool.insert(pool.end(), g.begin(), g.end());
  groups.clear();
  while (true) {
    live.clear();
    for (vertex_id v : pool)
      if (R.contract_round[v] < 0) live.push_back(v);
    if (live.empty()) break;
    run_round(live);
  }
  return R;
}

}  // namespace rctree
