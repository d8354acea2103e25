#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rctree/algebra.hpp"
#include "rctree/contraction.hpp"
#include "rctree/parallel.hpp"

// Queries over the cluster forest. Everything here is a read-only climb:
// starting from a vertex's own composite cluster, we carry, for each
// boundary vertex of the current cluster, the aggregate of the path from
// the query vertex to that boundary. One climb step extends those partials
// across the parent's spine. Two climbs meet at the lowest common cluster,
// whose representative is the junction vertex of the two paths.
//
// Path-style queries need per-cluster spine aggregates, so they require an
// algebra exposing the weight_summary fields plus vertex values; purely
// structural queries (connectivity) work with any algebra.

namespace rctree {

template <typename A>
concept path_query_algebra =
    cluster_algebra<A> &&
    requires(const A a, vertex_id v, const typename A::value& x) {
      { x.total } -> std::convertible_to<weight_t>;
      { x.spine_sum } -> std::convertible_to<weight_t>;
      { x.spine_min } -> std::convertible_to<extreme_edge>;
      { x.spine_max } -> std::convertible_to<extreme_edge>;
      { a.vertex_value(v) } -> std::convertible_to<weight_t>;
      { a.path_mode() } -> std::same_as<path_vertex_mode>;
    };

template <cluster_algebra A>
bool connected(const contraction_record<A>& R, vertex_id u, vertex_id v) {
  require_vertex(u, R.cfg.n, "connected");
  require_vertex(v, R.cfg.n, "connected");
  if (u == v) return true;
  return R.root_of(u) == R.root_of(v);
}

namespace detail {

// Aggregate along a partially climbed path: edge weights, extreme edges,
// hop count, and (mode permitting) interior vertex values. Endpoint vertex
// values are never included here; callers add them at the very end.
struct path_partial {
  weight_t sum = 0;
  extreme_edge mn{};
  extreme_edge mx{};
  std::uint64_t hops = 0;
};

// The partials for the (at most two) boundary vertices of one cluster.
struct boundary_partials {
  std::array<vertex_id, 2> bnd{nil_vertex, nil_vertex};
  std::array<path_partial, 2> agg{};
  int arity = 0;

  const path_partial& at(vertex_id v) const {
    assert(arity > 0 && (bnd[0] == v || (arity == 2 && bnd[1] == v)));
    return bnd[0] == v ? agg[0] : agg[1];
  }
  bool has(vertex_id v) const {
    return (arity > 0 && bnd[0] == v) || (arity == 2 && bnd[1] == v);
  }
};

// p extended along the spine of cluster S
template <path_query_algebra A>
path_partial extend_spine(const contraction_record<A>& R, path_partial p,
                          cluster_handle S) {
  const auto& c = R.clusters[S];
  p.sum += c.value.spine_sum;
  p.mn = min_edge(p.mn, c.value.spine_min);
  p.mx = max_edge(p.mx, c.value.spine_max);
  p.hops += c.spine_hops;
  return p;
}

// p extended through vertex `via` and then along the spine of cluster S;
// `via` becomes an interior vertex of the described path
template <path_query_algebra A>
path_partial extend(const contraction_record<A>& R, path_partial p, vertex_id via,
                    cluster_handle S) {
  if (R.algebra.path_mode() != path_vertex_mode::edges_only)
    p.sum += R.algebra.vertex_value(via);
  return extend_spine(R, p, S);
}

template <path_query_algebra A>
struct climb_state {
  cluster_handle cur = nil_cluster;
  boundary_partials p;
  // every level visited, bottom-up: needed to walk back down for vertex_at
  std::vector<std::pair<cluster_handle, boundary_partials>> chain;

  void push() { chain.emplace_back(cur, p); }
};

// partials of a vertex inside its own composite cluster: one per boundary,
// each the spine of the corresponding spine child
template <path_query_algebra A>
climb_state<A> start_climb(const contraction_record<A>& R, vertex_id v) {
  climb_state<A> st;
  st.cur = R.vertex_cluster[v];
  const auto& c = R.clusters[st.cur];
  st.p.arity = c.boundary_arity();
  for (int i = 0; i < st.p.arity; ++i) {
    st.p.bnd[i] = c.boundary[i];
    st.p.agg[i] = extend_spine(R, path_partial{}, c.spine_child[i]);
  }
  st.push();
  return st;
}

}  // namespace detail

namespace detail {

// One climb step from st.cur into its parent.
template <path_query_algebra A>
void climb_step(const contraction_record<A>& R, climb_state<A>& st) {
  cluster_handle P = R.clusters[st.cur].parent;
  assert(P != nil_cluster);
  const auto& parent = R.clusters[P];
  const auto& child = R.clusters[st.cur];
  vertex_id m = parent.rep;
  boundary_partials next;
  next.arity = parent.boundary_arity();
  for (int i = 0; i < next.arity; ++i) {
    vertex_id w = parent.boundary[i];
    next.bnd[i] = w;
    if (child.on_boundary(w)) {
      next.agg[i] = st.p.at(w);  // route unchanged: w was already reachable
    } else {
      // route leaves the child at m and crosses the parent's spine toward w
      cluster_handle S =
          parent.kind == cluster_kind::unary ? parent.spine_child[0]
                                             : parent.spine_child[i];
      next.agg[i] = extend(R, st.p.at(m), m, S);
    }
  }
  st.cur = P;
  st.p = next;
  st.push();
}

// Meeting point of the two climbs. The junction vertex z is the
// representative of the lowest common cluster; in the symmetric case both
// sides' partials reach z, in the asymmetric case the unmoved side IS z's
// own cluster and only the moved side carries a partial.
template <path_query_algebra A>
struct meet_result {
  vertex_id z = nil_vertex;
  bool symmetric = false;
  path_partial from_u;  // u -> z  (asymmetric with z == u: empty)
  path_partial from_v;  // v -> z  (asymmetric with z == v: empty)
  climb_state<A> su, sv;
};

template <path_query_algebra A>
meet_result<A> meet(const contraction_record<A>& R, vertex_id u, vertex_id v,
                    const char* where) {
  assert(u != v);
  meet_result<A> res;
  res.su = start_climb(R, u);
  res.sv = start_climb(R, v);
  auto& su = res.su;
  auto& sv = res.sv;
  while (true) {
    cluster_handle Pu = R.clusters[su.cur].parent;
    cluster_handle Pv = R.clusters[sv.cur].parent;
    if (Pu != nil_cluster && Pu == Pv) {
      res.z = R.clusters[Pu].rep;
      res.symmetric = true;
      res.from_u = su.p.at(res.z);
      res.from_v = sv.p.at(res.z);
      return res;
    }
    if (Pu == sv.cur) {
      // u's chain reached v's own cluster, so the junction is v itself
      res.z = R.clusters[sv.cur].rep;
      assert(res.z == v);
      res.from_u = su.p.at(res.z);
      return res;
    }
    if (Pv == su.cur) {
      res.z = R.clusters[su.cur].rep;
      assert(res.z == u);
      res.from_v = sv.p.at(res.z);
      return res;
    }
    if (Pu == nil_cluster && Pv == nil_cluster)
      throw query_error(query_error::kind::not_connected,
                        std::string(where) + ": " + std::to_string(u) + " and " +
                            std::to_string(v) + " are in different trees");
    // climb the side whose parent sits lower; ties climb both
    bool step_u = Pu != nil_cluster &&
                  (Pv == nil_cluster ||
                   R.clusters[Pu].height <= R.clusters[Pv].height);
    bool step_v = Pv != nil_cluster &&
                  (Pu == nil_cluster ||
                   R.clusters[Pv].height <= R.clusters[Pu].height);
    if (step_u) climb_step(R, su);
    if (step_v) climb_step(R, sv);
  }
}

// vertex at distance k from `from` along the boundary path of spine
// cluster S (k <= S.spine_hops)
template <path_query_algebra A>
vertex_id spine_at(const contraction_record<A>& R, cluster_handle S,
                   vertex_id from, std::uint64_t k) {
  while (true) {
    const auto& c = R.clusters[S];
    assert(k <= c.spine_hops);
    if (k == 0) return from;
    if (c.kind == cluster_kind::base) {
      assert(k == 1);
      return c.edge.other(from);
    }
    int side = c.boundary[0] == from ? 0 : 1;
    assert(c.boundary[side] == from);
    cluster_handle near = c.spine_child[side];
    std::uint64_t h = R.clusters[near].spine_hops;
    if (k < h) {
      S = near;
    } else if (k == h) {
      return c.rep;
    } else {
      from = c.rep;
      k -= h;
      S = c.spine_child[1 - side];
    }
  }
}

// vertex at distance k from the climb's origin along the path to boundary
// vertex b of the top cluster in the chain
template <path_query_algebra A>
vertex_id descend(const contraction_record<A>& R, const climb_state<A>& st,
                  vertex_id b, std::uint64_t k) {
  std::size_t lvl = st.chain.size() - 1;
  while (lvl > 0) {
    cluster_handle C = st.chain[lvl].first;
    const boundary_partials& pc = st.chain[lvl - 1].second;
    const auto& cc = R.clusters[st.chain[lvl - 1].first];
    if (cc.on_boundary(b)) {
      --lvl;  // path to b lies entirely in the child
      continue;
    }
    vertex_id m = R.clusters[C].rep;
    std::uint64_t h = pc.at(m).hops;
    if (k < h) {
      b = m;
      --lvl;
      continue;
    }
    if (k == h) return m;
    const auto& par = R.clusters[C];
    int side = 0;
    if (par.kind == cluster_kind::binary) side = par.boundary[0] == b ? 0 : 1;
    return spine_at(R, par.spine_child[side], m, k - h);
  }
  // bottom: b is a boundary of the origin's own cluster
  const auto& c = R.clusters[st.chain[0].first];
  int side = c.boundary[0] == b ? 0 : 1;
  assert(c.boundary[side] == b);
  return spine_at(R, c.spine_child[side], c.rep, k);
}

// k-th vertex (by edge count, from the u end) on the u..v path of a meet
template <path_query_algebra A>
vertex_id vertex_at(const contraction_record<A>& R, const meet_result<A>& mr,
                    std::uint64_t k) {
  std::uint64_t du = mr.from_u.hops;
  std::uint64_t dv = mr.from_v.hops;
  assert(k <= du + dv);
  if (k == du) return mr.z;
  if (k < du) return descend(R, mr.su, mr.z, k);
  return descend(R, mr.sv, mr.z, du + dv - k);
}

}  // namespace detail

template <path_query_algebra A>
std::uint64_t path_hops(const contraction_record<A>& R, vertex_id u, vertex_id v) {
  require_vertex(u, R.cfg.n, "path_hops");
  require_vertex(v, R.cfg.n, "path_hops");
  if (u == v) return 0;
  auto mr = detail::meet(R, u, v, "path_hops");
  return mr.from_u.hops + mr.from_v.hops;
}

template <path_query_algebra A>
weight_t path_sum(const contraction_record<A>& R, vertex_id u, vertex_id v) {
  require_vertex(u, R.cfg.n, "path_sum");
  require_vertex(v, R.cfg.n, "path_sum");
  if (u == v) return 0;
  auto mr = detail::meet(R, u, v, "path_sum");
  weight_t total = mr.from_u.sum + mr.from_v.sum;
  path_vertex_mode mode = R.algebra.path_mode();
  if (mr.symmetric && mode != path_vertex_mode::edges_only)
    total += R.algebra.vertex_value(mr.z);  // z interior only in this case
  if (mode == path_vertex_mode::all)
    total += R.algebra.vertex_value(u) + R.algebra.vertex_value(v);
  return total;
}

template <path_query_algebra A>
std::pair<edge_id, weight_t> path_extreme_edge(const contraction_record<A>& R,
                                               vertex_id u, vertex_id v,
                                               bool want_max) {
  require_vertex(u, R.cfg.n, "path_extreme_edge");
  require_vertex(v, R.cfg.n, "path_extreme_edge");
  if (u == v)
    throw query_error(query_error::kind::same_vertex,
                      "path_extreme_edge: u == v == " + std::to_string(u));
  auto mr = detail::meet(R, u, v, "path_extreme_edge");
  extreme_edge best = want_max ? max_edge(mr.from_u.mx, mr.from_v.mx)
                               : min_edge(mr.from_u.mn, mr.from_v.mn);
  assert(best.present);
  return {best.e, best.w};
}

// Aggregate of the subtree hanging off r through its neighbor c (rooted at
// r): the r-c edge itself, every c-side edge, and every c-side vertex value
// including c's.
template <path_query_algebra A>
weight_t subtree_sum(const contraction_record<A>& R, vertex_id r, vertex_id c) {
  require_vertex(r, R.cfg.n, "subtree_sum");
  require_vertex(c, R.cfg.n, "subtree_sum");
  auto it = R.edge_base.find(edge_id(r, c));
  if (it == R.edge_base.end())
    throw query_error(query_error::kind::not_adjacent,
                      "subtree_sum: no edge (" + std::to_string(r) + "," +
                          std::to_string(c) + ")");
  cluster_handle C = it->second;
  weight_t acc = R.clusters[C].value.total;
  // which side of the r-c edge each boundary vertex of C hangs on
  std::array<bool, 2> on_c_side{R.clusters[C].boundary[0] == c,
                                R.clusters[C].boundary[1] == c};
  while (true) {
    const auto& c_cur = R.clusters[C];
    cluster_handle P = c_cur.parent;
    if (P == nil_cluster) break;
    const auto& par = R.clusters[P];
    vertex_id m = par.rep;
    int mi = c_cur.boundary[0] == m ? 0 : 1;
    assert(c_cur.on_boundary(m));
    bool m_on_c_side = on_c_side[mi];
    if (m_on_c_side) {
      for (cluster_handle k : par.children)
        if (k != C) acc += R.clusters[k].value.total;
      acc += R.algebra.vertex_value(m);
    }
    std::array<bool, 2> next{};
    for (int i = 0; i < par.boundary_arity(); ++i)
      next[i] = c_cur.on_boundary(par.boundary[i])
                    ? on_c_side[c_cur.boundary[0] == par.boundary[i] ? 0 : 1]
                    : m_on_c_side;
    on_c_side = next;
    C = P;
  }
  return acc;
}

// Lowest common ancestor of u and v when the tree is rooted at r, found as
// the junction of the three pairwise paths.
template <path_query_algebra A>
vertex_id lca(const contraction_record<A>& R, vertex_id r, vertex_id u, vertex_id v) {
  require_vertex(r, R.cfg.n, "lca");
  require_vertex(u, R.cfg.n, "lca");
  require_vertex(v, R.cfg.n, "lca");
  if (!connected(R, r, u) || !connected(R, r, v))
    throw query_error(query_error::kind::not_connected,
                      "lca: arguments span different trees");
  if (u == v) return u;
  if (r == u || r == v) return r;
  auto uv = detail::meet(R, u, v, "lca");
  std::uint64_t d_uv = uv.from_u.hops + uv.from_v.hops;
  auto ur = detail::meet(R, u, r, "lca");
  std::uint64_t d_ur = ur.from_u.hops + ur.from_v.hops;
  auto vr = detail::meet(R, v, r, "lca");
  std::uint64_t d_vr = vr.from_u.hops + vr.from_v.hops;
  assert((d_uv + d_ur + d_vr) % 2 == 0);
  std::uint64_t k = (d_uv + d_ur - d_vr) / 2;
  return detail::vertex_at(R, uv, k);
}

// ------------------------------------------------------------------
// batch interface: positional answers, per-element error isolation

struct query_request {
  enum class kind : std::uint8_t { connected, subtree, path_sum, path_min, path_max, lca };
  kind k = kind::connected;
  vertex_id a = nil_vertex;
  vertex_id b = nil_vertex;
  vertex_id c = nil_vertex;  // lca root
};

struct query_answer {
  using payload =
      std::variant<bool, weight_t, std::pair<edge_id, weight_t>, vertex_id>;
  std::optional<payload> value;
  std::optional<query_error::kind> err;
  std::string err_text;

  bool ok() const { return value.has_value(); }
  friend bool operator==(const query_answer& x, const query_answer& y) {
    return x.value == y.value && x.err == y.err;
  }
};

template <path_query_algebra A>
query_answer run_query(const contraction_record<A>& R, const query_request& q) {
  query_answer a;
  try {
    switch (q.k) {
      case query_request::kind::connected:
        a.value = connected(R, q.a, q.b);
        break;
      case query_request::kind::subtree:
        a.value = subtree_sum(R, q.a, q.b);
        break;
      case query_request::kind::path_sum:
        a.value = path_sum(R, q.a, q.b);
        break;
      case query_request::kind::path_min:
        a.value = path_extreme_edge(R, q.a, q.b, false);
        break;
      case query_request::kind::path_max:
        a.value = path_extreme_edge(R, q.a, q.b, true);
        break;
      case query_request::kind::lca:
        a.value = lca(R, q.c, q.a, q.b);
        break;
    }
  } catch (const query_error& e) {
    a.err = e.what_kind;
    a.err_text = e.what();
  }
  return a;
}

template <path_query_algebra A>
std::vector<query_answer> batch_query(const contraction_record<A>& R,
                                      const std::vector<query_request>& reqs,
                                      unsigned threads = 1) {
  std::vector<query_answer> out(reqs.size());
  parallel_for(reqs.size(), threads,
               [&](std::size_t i) { out[i] = run_query(R, reqs[i]); });
  return out;
}

}  // namespace rctree
