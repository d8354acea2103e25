#pragma once

#include <string>
#include <vector>

#include "rctree/contraction.hpp"

// Exhaustive structural checks over a contraction record: slot symmetry,
// liveness, cluster census, parent/child agreement, per-round maximality,
// shrink rate, and a full value recomputation. Used by tests and by the
// CLI's --debug-invariants sweep. Everything here is a read-only audit;
// failures throw invariant_error with a description of the first violation.

namespace rctree {

namespace detail {

inline void fail_check(const std::string& what) { throw invariant_error(what); }

}  // namespace detail

template <cluster_algebra A>
void check_record(const contraction_record<A>& R) {
  using detail::fail_check;
  const std::uint32_t n = R.cfg.n;
  const std::size_t m = R.edge_base.size();

  // per-vertex decision bookkeeping
  for (vertex_id v = 0; v < n; ++v) {
    if (R.contract_round[v] < 0) fail_check("vertex " + std::to_string(v) + " never contracted");
    std::size_t cr = std::size_t(R.contract_round[v]);
    if (!R.alive_at(v, cr)) fail_check("vertex not alive at its contraction round");
    if (R.alive_at(v, cr + 1)) fail_check("vertex alive after its contraction round");
    for (std::size_t r = 0; r < cr; ++r)
      if (!R.alive_at(v, r)) fail_check("liveness gap for vertex " + std::to_string(v));
    cluster_handle h = R.vertex_cluster[v];
    if (h == nil_cluster) fail_check("contracted vertex lacks a cluster");
    const auto& c = R.clusters[h];
    if (c.retired) fail_check("vertex cluster is retired");
    if (c.rep != v) fail_check("cluster representative mismatch");
    if (c.kind != kind_of(R.action[v])) fail_check("cluster kind does not match action");
    if (c.height != R.contract_round[v] + 1) fail_check("cluster height != contraction round + 1");
  }

  // census: m live bases + n live composites, nothing else
  std::size_t live_bases = 0, live_composites = 0;
  for (cluster_handle h = 0; h < R.clusters.pool_size(); ++h) {
    const auto& c = R.clusters[h];
    if (c.retired) continue;
    if (c.kind == cluster_kind::base) {
      ++live_bases;
      auto it = R.edge_base.find(c.edge);
      if (it == R.edge_base.end() || it->second != h)
        fail_check("live base cluster not registered for its edge");
      if (c.boundary[0] != c.edge.u || c.boundary[1] != c.edge.v)
        fail_check("base cluster boundary != its endpoints");
      if (c.spine_hops != 1) fail_check("base cluster spine_hops != 1");
    } else {
      ++live_composites;
      if (R.vertex_cluster[c.rep] != h) fail_check("composite not keyed by its representative");
      int arity = c.boundary_arity();
      for (int i = 0; i < arity; ++i)
        if (c.boundary[i] == nil_vertex) fail_check("missing boundary vertex");
      if (c.kind == cluster_kind::binary &&
          c.spine_hops != R.clusters[c.spine_child[0]].spine_hops +
                              R.clusters[c.spine_child[1]].spine_hops)
        fail_check("binary spine_hops != sum of spine children");
    }
    for (cluster_handle k : c.children) {
      if (R.clusters[k].retired) fail_check("live cluster has a retired child");
      if (R.clusters[k].parent != h) fail_check("child's parent pointer is stale");
    }
    if (c.kind != cluster_kind::root && c.kind != cluster_kind::base) {
      if (c.parent == nil_cluster) fail_check("non-root composite without a parent");
    }
    if (c.parent != nil_cluster) {
      const auto& p = R.clusters[c.parent];
      if (p.retired) fail_check("parent cluster is retired");
      bool found = false;
      for (cluster_handle k : p.children) found = found || k == h;
      if (!found) fail_check("cluster is not among its parent's children");
    }
  }
  if (live_bases != m) fail_check("live base count != edge count");
  if (live_composites != n) fail_check("live composite count != vertex count");

  // rows: symmetry, slot kinds, agreement with the contraction decisions
  for (std::size_t r = 0; r < R.round_count(); ++r) {
    const round_rows& rows = R.rounds[r];
    std::vector<vertex_id> live = rows.vertices_sorted();
    if (live.empty()) fail_check("stored round with no live vertices");
    for (vertex_id v : live) {
      auto row = rows.row(v);
      for (const slot& s : row) {
        switch (s.tag) {
          case slot_tag::empty:
            break;
          case slot_tag::edge: {
            if (r > 0 && R.clusters[s.h].kind != cluster_kind::base)
              fail_check("edge slot names a non-base cluster");
            vertex_id w = R.clusters[s.h].edge.other(v);
            if (!rows.contains(w)) fail_check("edge slot neighbor not alive");
            bool back = false;
            for (const slot& sw : rows.row(w)) back = back || sw == s;
            if (!back) fail_check("edge slot not mirrored by its neighbor");
            break;
          }
          case slot_tag::binary: {
            const auto& c = R.clusters[s.h];
            if (c.kind != cluster_kind::binary) fail_check("binary slot names a non-binary cluster");
            if (!c.on_boundary(v)) fail_check("binary slot owner not on cluster boundary");
            vertex_id w = c.other_boundary(v);
            if (!rows.contains(w)) fail_check("binary slot neighbor not alive");
            bool back = false;
            for (const slot& sw : rows.row(w)) back = back || sw == s;
            if (!back) fail_check("binary slot not mirrored by its neighbor");
            break;
          }
          case slot_tag::unary: {
            const auto& c = R.clusters[s.h];
            if (c.kind != cluster_kind::unary) fail_check("unary slot names a non-unary cluster");
            if (c.boundary[0] != v) fail_check("unary slot owner is not the cluster's boundary");
            break;
          }
        }
      }
    }

    // contraction decisions at this round: correct action for the degree,
    // children = non-empty slots, independence and maximality
    std::vector<vertex_id> contracted;
    for (vertex_id v : live) {
      if (std::size_t(R.contract_round[v]) != r) continue;
      contracted.push_back(v);
      auto row = rows.row(v);
      int deg = row_degree(row);
      action_kind want = deg == 0   ? action_kind::finalize
                         : deg == 1 ? action_kind::rake
                                    : action_kind::compress;
      if (deg > 2) fail_check("contracted vertex had degree > 2");
      if (R.action[v] != want) fail_check("action does not match round degree");
      const auto& c = R.clusters[R.vertex_cluster[v]];
      std::size_t ci = 0;
      for (const slot& s : row) {
        if (s.tag == slot_tag::empty) continue;
        if (ci >= c.children.size() || c.children[ci] != s.h)
          fail_check("cluster children disagree with the contraction row");
        ++ci;
      }
      if (ci != c.children.size()) fail_check("cluster has extra children");
    }
    // independence + maximality over eligible vertices
    std::vector<char> contracting(n, 0);
    for (vertex_id v : contracted) contracting[v] = 1;
    for (vertex_id v : live) {
      auto row = rows.row(v);
      int deg = row_degree(row);
      if (deg == 0 && !contracting[v]) fail_check("isolated vertex failed to finalize");
      if (deg == 0 || deg > 2) continue;
      bool covered = contracting[v] != 0;
      for (const slot& s : row) {
        if (!s.counts_degree()) continue;
        vertex_id w = R.slot_neighbor(v, s);
        if (contracting[v] && contracting[w])
          fail_check("two adjacent vertices contracted in one round");
        covered = covered || contracting[w];
      }
      if (!covered) fail_check("eligible vertex with no contracting neighbor");
    }
  }

  // aggregate values: recompute the whole forest bottom-up and compare
  {
    contraction_record<A> copy = R;
    std::vector<cluster_handle> order;
    for (cluster_handle h = 0; h < copy.clusters.pool_size(); ++h)
      if (!copy.clusters[h].retired) order.push_back(h);
    std::sort(order.begin(), order.end(), [&](cluster_handle a, cluster_handle b) {
      return copy.clusters[a].height < copy.clusters[b].height;
    });
    for (cluster_handle h : order) detail::recompute_value(copy, h);
    for (cluster_handle h : order)
      if (!(copy.clusters[h].value == R.clusters[h].value))
        fail_check("stored cluster value differs from bottom-up recomputation");
  }
}

// Global shrink audit: whenever round i has no isolated vertex, round i+1
// must keep at most 5/6 of the live set. Kept separate from check_record so
// callers can report the two failures apart.
template <cluster_algebra A>
void check_shrink(const contraction_record<A>& R) {
  for (std::size_t r = 0; r + 1 < R.round_count(); ++r) {
    const round_rows& rows = R.rounds[r];
    bool has_singleton = false;
    for (vertex_id v : rows.vertices_sorted())
      if (row_degree(rows.row(v)) == 0) has_singleton = true;
    if (has_singleton) continue;
    if (6 * R.rounds[r + 1].size() > 5 * rows.size())
      detail::fail_check("live set shrank by less than 1/6 in round " + std::to_string(r));
  }
}

}  // namespace rctree
