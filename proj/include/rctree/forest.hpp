#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rctree/batch_update.hpp"
#include "rctree/contraction.hpp"
#include "rctree/core.hpp"
#include "rctree/queries.hpp"
#include "rctree/union_find.hpp"

// Owning facade over a contraction record. It adds the pieces callers need
// around the raw engine: all-or-nothing batch validation, the choice of
// update executor, query forwarding, and a per-round degree probe. One
// mutator at a time; reads are safe between mutations.

namespace rctree {

enum class executor_kind : std::uint8_t { basic, phased };

struct forest_options {
  executor_kind executor = executor_kind::basic;
  unsigned threads = 1;
  bool debug_invariants = false;
};

inline const char* executor_name(executor_kind x) {
  return x == executor_kind::phased ? "phased" : "basic";
}

template <cluster_algebra A>
class rc_forest {
 public:
  using algebra_type = A;
  using record_type = contraction_record<A>;

  // Proof that a batch passed validate_batch against this forest's current
  // edge set. It expires as soon as any edit lands: the checks bind to one
  // state only.
  class validated_edit {
   public:
    const batch_edit& edit() const { return edit_; }

   private:
    friend class rc_forest;
    validated_edit(batch_edit e, std::uint64_t stamp)
        : edit_(std::move(e)), stamp_(stamp) {}

    batch_edit edit_;
    std::uint64_t stamp_ = 0;
  };

  // n isolated vertices, each finalized into its own root cluster. n = 0 is
  // the degenerate empty structure: every query rejects its arguments.
  explicit rc_forest(forest_config cfg, A algebra = {}, forest_options opt = {})
      : rc_forest(cfg, std::vector<weighted_edge>{}, std::move(algebra), opt) {}

  // Initial forest from an edge list; rejects non-forests and degree > t.
  rc_forest(forest_config cfg, std::vector<weighted_edge> edges, A algebra = {},
            forest_options opt = {})
      : opt_(opt),
        R_(opt.executor == executor_kind::phased
               ? build_static_phased(std::move(edges), cfg, std::move(algebra),
                                     opt.threads)
               : build_static(std::move(edges), cfg, std::move(algebra),
                              opt.threads)) {}

  std::uint32_t vertex_count() const { return R_.cfg.n; }
  std::uint32_t degree_bound() const { return R_.cfg.t; }
  std::size_t edge_count() const { return R_.edge_base.size(); }
  bool has_edge(edge_id e) const { return R_.edge_base.count(e) != 0; }

  const record_type& record() const { return R_; }
  forest_options& options() { return opt_; }
  const forest_options& options() const { return opt_; }

  // Current edge set, canonically sorted.
  std::vector<weighted_edge> edges() const {
    std::vector<weighted_edge> out;
    out.reserve(R_.edge_base.size());
    for (const auto& [e, h] : R_.edge_base)
      out.push_back({e, R_.clusters[h].edge_weight});
    return out;
  }

  // Admits a batch if and only if applying it yields a simple forest with
  // max degree <= t. Any bad element rejects the whole batch; the error
  // names the first offender in batch order. Checked in sequence: endpoints
  // in range, deletions present and unique, insertions absent / unique /
  // disjoint from the deletions, post-edit degrees, post-edit acyclicity.
  validated_edit validate_batch(batch_edit edit) const {
    const std::uint32_t n = R_.cfg.n;
    for (const edge_id& e : edit.erase) {
      require_vertex(e.u, n, "validate_batch");
      require_vertex(e.v, n, "validate_batch");
    }
    for (const weighted_edge& we : edit.insert) {
      require_vertex(we.e.u, n, "validate_batch");
      require_vertex(we.e.v, n, "validate_batch");
    }

    std::set<edge_id> del;
    for (const edge_id& e : edit.erase) {
      if (!del.insert(e).second)
        throw validation_error(validation_error::kind::duplicate_edge, e,
                               "edge " + edge_text(e) +
                                   " deleted twice in one batch");
      if (!R_.edge_base.count(e))
        throw validation_error(validation_error::kind::missing_edge, e,
                               "edge " + edge_text(e) + " is not present");
    }

    std::set<edge_id> ins;
    for (const weighted_edge& we : edit.insert) {
      const edge_id e = we.e;
      if (e.u == e.v)
        throw validation_error(validation_error::kind::cycle, e,
                               "self-loop " + edge_text(e));
      if (!ins.insert(e).second)
        throw validation_error(validation_error::kind::duplicate_edge, e,
                               "edge " + edge_text(e) +
                                   " inserted twice in one batch");
      if (del.count(e))
        throw validation_error(validation_error::kind::duplicate_edge, e,
                               "edge " + edge_text(e) +
                                   " both inserted and deleted");
      if (R_.edge_base.count(e))
        throw validation_error(validation_error::kind::duplicate_edge, e,
                               "edge " + edge_text(e) + " is already present");
    }

    // Degrees: deletions land first, then insertions one at a time, so the
    // first insertion to push an endpoint past t is the one reported.
    std::map<vertex_id, std::int64_t> deg;
    auto degree_of = [&](vertex_id v) -> std::int64_t& {
      auto it = deg.find(v);
      if (it == deg.end())
        it = deg.emplace(v, row_degree(R_.rounds[0].row(v))).first;
      return it->second;
    };
    for (const edge_id& e : edit.erase) {
      --degree_of(e.u);
      --degree_of(e.v);
    }
    for (const weighted_edge& we : edit.insert) {
      for (vertex_id v : {we.e.u, we.e.v}) {
        if (++degree_of(v) > R_.cfg.t)
          throw validation_error(
              validation_error::kind::degree_overflow, we.e,
              "vertex " + std::to_string(v) + " would exceed degree bound t=" +
                  std::to_string(R_.cfg.t) + " at edge " + edge_text(we.e));
      }
    }

    // Cycles: only insertions can close one. Flood the touched components
    // across surviving edges, uniting as we go (a forest minus edges stays
    // acyclic, so those unions never fail), then try each insertion in
    // batch order. Every vertex a new cycle could pass through is reachable
    // from some edit endpoint along surviving or inserted edges.
    if (!edit.insert.empty()) {
      union_find uf(n);
      std::vector<char> seen(n, 0);
      std::vector<vertex_id> stack;
      auto seed = [&](vertex_id v) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      };
      for (const edge_id& e : edit.erase) {
        seed(e.u);
        seed(e.v);
      }
      for (const weighted_edge& we : edit.insert) {
        seed(we.e.u);
        seed(we.e.v);
      }
      while (!stack.empty()) {
        vertex_id v = stack.back();
        stack.pop_back();
        for (const slot& s : R_.rounds[0].row(v)) {
          if (s.tag != slot_tag::edge) continue;
          const edge_id e = R_.clusters[s.h].edge;
          if (del.count(e)) continue;
          uf.unite(e.u, e.v);
          seed(e.other(v));
        }
      }
      for (const weighted_edge& we : edit.insert)
        if (!uf.unite(we.e.u, we.e.v))
          throw validation_error(validation_error::kind::cycle, we.e,
                                 "edge " + edge_text(we.e) +
                                     " would close a cycle");
    }

    return validated_edit(std::move(edit), version_);
  }

  // Applies a pre-validated batch. The token must come from this forest's
  // current state; anything staler throws, since its checks no longer bind.
  update_stats apply(const validated_edit& ve) {
    if (ve.stamp_ != version_)
      throw error("validated edit is stale: the forest has been edited since");
    update_options uo;
    uo.threads = opt_.threads;
    uo.debug_invariants = opt_.debug_invariants;
    update_stats s = opt_.executor == executor_kind::phased
                         ? batch_update_phased(R_, ve.edit(), uo)
                         : batch_update(R_, ve.edit(), uo);
    ++version_;
    return s;
  }

  update_stats apply(batch_edit edit) {
    return apply(validate_batch(std::move(edit)));
  }

  // Number of edge-bearing slots (edge or binary cluster) in v's row at
  // `round`. Unary slots carry no adjacency and never count. Vertices that
  // contracted before `round` are gone and report dead_vertex.
  std::uint32_t degree(vertex_id v, std::uint32_t round = 0) const {
    require_vertex(v, R_.cfg.n, "degree");
    if (!R_.alive_at(v, round))
      throw query_error(query_error::kind::dead_vertex,
                        "degree: vertex " + std::to_string(v) +
                            " is not live at round " + std::to_string(round));
    return std::uint32_t(row_degree(R_.rounds[round].row(v)));
  }

  bool connected(vertex_id u, vertex_id v) const {
    return rctree::connected(R_, u, v);
  }

  weight_t subtree_sum(vertex_id r, vertex_id c) const
    requires path_query_algebra<A>
  {
    return rctree::subtree_sum(R_, r, c);
  }

  weight_t path_sum(vertex_id u, vertex_id v) const
    requires path_query_algebra<A>
  {
    return rctree::path_sum(R_, u, v);
  }

  std::uint64_t path_hops(vertex_id u, vertex_id v) const
    requires path_query_algebra<A>
  {
    return rctree::path_hops(R_, u, v);
  }

  std::pair<edge_id, weight_t> path_extreme_edge(vertex_id u, vertex_id v,
                                                 bool want_max) const
    requires path_query_algebra<A>
  {
    return rctree::path_extreme_edge(R_, u, v, want_max);
  }

  vertex_id lca(vertex_id r, vertex_id u, vertex_id v) const
    requires path_query_algebra<A>
  {
    return rctree::lca(R_, r, u, v);
  }

  std::vector<query_answer> run(const std::vector<query_request>& reqs) const
    requires path_query_algebra<A>
  {
    return batch_query(R_, reqs, opt_.threads);
  }

 private:
  static std::string edge_text(edge_id e) {
    return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
  }

  forest_options opt_;
  record_type R_;
  std::uint64_t version_ = 0;
};

}  // namespace rctree
