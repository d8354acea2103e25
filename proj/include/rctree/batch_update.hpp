#pragma once

// Batch edits against a finished contraction record. A k-edge batch of
// insertions and deletions is folded into the record by replaying the
// contraction only where its outcome can differ: each round re-decides an
// affected set seeded by the edited endpoints and grown by spreading, while
// every other vertex keeps its original decision, row, and cluster. Total
// work is proportional to the affected sets, never to the forest, so the
// touched (vertex, round) count stays within O(k log(1 + n/k)).
//
// Edits are assumed valid (deleted edges present, inserted edges absent,
// degrees within bounds, no cycles). rc_forest validates before calling in.

#include <algorithm>
#include <array>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rctree/chain_mis.hpp"
#include "rctree/contraction.hpp"
#include "rctree/core.hpp"
#include "rctree/parallel.hpp"

namespace rctree {

// Per-update accounting. per_round_affected[i] is the number of vertices
// whose round-i outcome had to be re-examined; total_touched is their sum,
// the work measure the size bounds are stated against.
struct update_stats {
  std::uint64_t k = 0;
  std::uint32_t rounds = 0;
  std::vector<std::uint64_t> per_round_affected;
  std::uint64_t total_touched = 0;
  std::uint64_t wall_time_ns = 0;
};

struct update_options {
  unsigned threads = 1;
  // Track the affected set's component partition and verify the size and
  // shape bounds every round. Expensive; meant for the test harness.
  bool debug_invariants = false;
};

namespace detail {

// Deliberate defects for the mutation tests. Never set by the public entry
// points.
struct update_faults {
  // Drop the rule that re-examines a surviving vertex once all the
  // neighbors it deferred to are being re-decided.
  bool skip_stranded_rule = false;
};

// Pre-update images of rows the engine is about to modify, keyed by vertex,
// one shadow per round. A vertex absent from the shadow was not touched at
// that round, so the stored row still is the old row; a captured nullopt
// means the vertex had no row there before the update.
class row_shadow {
 public:
  void capture(vertex_id v, const round_rows& rr) {
    if (entries_.count(v)) return;
    if (rr.contains(v)) {
      std::span<const slot> r = rr.row(v);
      entries_.emplace(v, std::vector<slot>(r.begin(), r.end()));
    } else {
      entries_.emplace(v, std::nullopt);
    }
  }
  bool alive(vertex_id v, const round_rows& rr) const {
    auto it = entries_.find(v);
    return it == entries_.end() ? rr.contains(v) : it->second.has_value();
  }
  std::span<const slot> row(vertex_id v, const round_rows& rr) const {
    auto it = entries_.find(v);
    if (it == entries_.end()) return rr.row(v);
    return {it->second->data(), it->second->size()};
  }
  void swap(row_shadow& other) { entries_.swap(other.entries_); }
  void clear() { entries_.clear(); }

 private:
  std::unordered_map<vertex_id, std::optional<std::vector<slot>>> entries_;
};

// What one round hands the wavefront bookkeeping: the exact affected set
// for the next round and, for each vertex that was not affected before, the
// sorted spreaders that pulled it in. Entries appear in resolution order:
// vertices adjacent to a changed outcome first, stranded survivors second,
// so a spreader is always either a previous-round member or an earlier
// entry in the same list.
struct round_outcome {
  std::vector<vertex_id> next;
  std::vector<std::pair<vertex_id, std::vector<vertex_id>>> spread;
};

// Plain wavefront: one sorted vector, replaced wholesale each round.
class basic_wave {
 public:
  void seed(std::vector<vertex_id> a0) { cur_ = std::move(a0); }
  const std::vector<vertex_id>& current() const { return cur_; }
  void advance(round_outcome&& out) { cur_ = std::move(out.next); }

 private:
  std::vector<vertex_id> cur_;
};

// Wavefront organized for processor-efficient scheduling. The affected set
// is held as disjoint blocks: one per seed vertex for the first
// ceil(log_{6/5}(1 + n/k)) rounds, regrouped into ceil(log2 k)-sized blocks
// for roughly log log k more rounds, then scattered into singletons for the
// tail. Rounds filter each block locally instead of compacting the whole
// set. A newly affected vertex joins the block of its lowest-id spreader.
// The union presented each round is exactly the plain wavefront's set, so
// both drivers produce byte-identical records.
class phased_wave {
 public:
  phased_wave(std::uint32_t n, std::uint64_t k) {
    if (k > 0)
      phase1_end_ = std::uint32_t(
          ceil_log_6_5(1.0L + (long double)n / (long double)k));
    long double kk = (long double)std::max<std::uint64_t>(k, 2);
    block_width_ = std::max<std::size_t>(1, std::size_t(std::ceil(std::log2(kk))));
    phase2_len_ = std::uint32_t(ceil_log_6_5(std::log2(kk)));
  }

  void seed(std::vector<vertex_id> a0) {
    blocks_.clear();
    block_of_.clear();
    round_ = 0;
    for (vertex_id v : a0) {
      block_of_[v] = std::uint32_t(blocks_.size());
      blocks_.push_back({v});
    }
    rebuild_union();
  }

  const std::vector<vertex_id>& current() const { return union_; }

  void advance(round_outcome&& out) {
    ++round_;
    // Place newcomers before filtering: the lowest-id spreader may itself
    // drop out of the affected set this round, but its block at the time of
    // spreading is what the newcomer joins.
    std::vector<std::pair<vertex_id, std::uint32_t>> placed;
    for (const auto& [v, from] : out.spread) {
      assert(!from.empty());
      auto it = block_of_.find(from.front());
      assert(it != block_of_.end());
      placed.emplace_back(v, it->second);
      block_of_[v] = it->second;
    }
    for (auto& b : blocks_)
      std::erase_if(b, [&](vertex_id v) {
        bool keep = std::binary_search(out.next.begin(), out.next.end(), v);
        if (!keep) block_of_.erase(v);
        return !keep;
      });
    for (const auto& [v, j] : placed) blocks_[j].push_back(v);
    if (round_ == phase1_end_) regroup(block_width_);
    if (round_ == phase1_end_ + phase2_len_) regroup(1);
    rebuild_union();
  }

 private:
  void regroup(std::size_t width) {
    std::vector<vertex_id> all;
    for (const auto& b : blocks_) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    blocks_.clear();
    block_of_.clear();
    for (std::size_t i = 0; i < all.size(); i += width) {
      std::uint32_t j = std::uint32_t(blocks_.size());
      std::size_t end = std::min(all.size(), i + width);
      blocks_.emplace_back(all.begin() + i, all.begin() + end);
      for (std::size_t p = i; p < end; ++p) block_of_[all[p]] = j;
    }
  }

  void rebuild_union() {
    union_.clear();
    for (const auto& b : blocks_) union_.insert(union_.end(), b.begin(), b.end());
    std::sort(union_.begin(), union_.end());
  }

  std::vector<std::vector<vertex_id>> blocks_;
  std::unordered_map<vertex_id, std::uint32_t> block_of_;
  std::vector<vertex_id> union_;
  std::uint32_t round_ = 0;
  std::uint32_t phase1_end_ = 0;
  std::uint32_t phase2_len_ = 0;
  std::size_t block_width_ = 1;
};

template <cluster_algebra A>
class update_engine {
 public:
  update_engine(contraction_record<A>& R, const update_options& opt,
                const update_faults& faults)
      : R_(R), opt_(opt), faults_(faults) {}

  template <typename Wave>
  update_stats run(const batch_edit& edit, Wave& wave) {
    auto t0 = std::chrono::steady_clock::now();
    update_stats st;
    st.k = edit.size();
    std::vector<vertex_id> a0 = edit.empty() ? std::vector<vertex_id>{} : seed(edit);
    if (opt_.debug_invariants) tracker_seed(a0, st.k);
    wave.seed(std::move(a0));

    // Both the old and the new contraction finish within this many rounds;
    // a wave still alive past it means the propagation logic broke.
    const std::int32_t round_cap =
        std::int32_t(ceil_log_6_5((long double)std::max<std::uint32_t>(R_.cfg.n, 2))) + 3;

    while (!wave.current().empty()) {
      if (round_ > round_cap)
        throw invariant_error("batch update failed to converge by round " +
                              std::to_string(round_));
      cur_ = wave.current();
      st.per_round_affected.push_back(cur_.size());
      st.total_touched += cur_.size();
      ensure_next_round();
      if (opt_.debug_invariants) check_wave_shape(st.k);
      classify_and_decide();
      apply_decisions();
      round_outcome out = propagate();
      if (opt_.debug_invariants) tracker_advance(out);
      wave.advance(std::move(out));
      shadow_cur_.swap(shadow_next_);
      shadow_next_.clear();
      ++round_;
    }

    trim_rounds();
    st.rounds = std::uint32_t(st.per_round_affected.size());
    st.wall_time_ns = std::uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count());
    return st;
  }

 private:
  static constexpr std::size_t npos = std::size_t(-1);

  // ---- old-state capture ----------------------------------------------

  // First touch records the pre-update decision; afterwards the stored
  // fields are free to change. ocr() is the contraction round the vertex
  // had before this update started.
  void capture_decision(vertex_id v) {
    if (old_round_.count(v)) return;
    old_round_.emplace(v, R_.contract_round[v]);
    old_cluster_.emplace(v, R_.vertex_cluster[v]);
  }

  std::int32_t ocr(vertex_id v) const {
    auto it = old_round_.find(v);
    return it != old_round_.end() ? it->second : R_.contract_round[v];
  }

  // The composite the vertex owned before the update is superseded the
  // moment its round is re-decided; retire it exactly once.
  void retire_superseded(vertex_id v) {
    capture_decision(v);
    if (!retired_.insert(v).second) return;
    cluster_handle h = old_cluster_.find(v)->second;
    if (h != nil_cluster) R_.clusters.retire(h);
  }

  // ---- wave helpers ----------------------------------------------------

  std::size_t wave_index(vertex_id v) const {
    auto it = std::lower_bound(cur_.begin(), cur_.end(), v);
    return (it != cur_.end() && *it == v) ? std::size_t(it - cur_.begin()) : npos;
  }
  bool in_wave(vertex_id v) const { return wave_index(v) != npos; }

  void ensure_next_round() {
    if (std::size_t(round_) + 1 >= R_.rounds.size()) R_.rounds.emplace_back(R_.cfg.t);
  }

  // ---- seeding ---------------------------------------------------------

  std::vector<vertex_id> seed(const batch_edit& edit) {
    round_rows& r0 = R_.rounds[0];
    std::set<vertex_id> touched;

    // Deletions first, then insertions, each in canonical edge order, so
    // base handles and slot placement depend only on the edit's content.
    std::vector<edge_id> dels(edit.erase);
    std::sort(dels.begin(), dels.end());
    for (const edge_id& e : dels) {
      auto it = R_.edge_base.find(e);
      assert(it != R_.edge_base.end());
      cluster_handle h = it->second;
      for (vertex_id x : {e.u, e.v}) {
        shadow_cur_.capture(x, r0);
        bool hit = false;
        for (slot& s : r0.row(x))
          if (s.tag == slot_tag::edge && s.h == h) {
            s = slot{};
            hit = true;
            break;
          }
        assert(hit);
        (void)hit;
        touched.insert(x);
      }
      R_.clusters.retire(h);
      R_.edge_base.erase(it);
    }

    std::vector<weighted_edge> ins(edit.insert);
    std::sort(ins.begin(), ins.end(),
              [](const weighted_edge& a, const weighted_edge& b) { return a.e < b.e; });
    for (const weighted_edge& we : ins) {
      cluster<typename A::value> b;
      b.kind = cluster_kind::base;
      b.edge = we.e;
      b.edge_weight = we.w;
      b.boundary = {we.e.u, we.e.v};
      b.spine_hops = 1;
      b.value = R_.algebra.edge_value(we.e, we.w);
      cluster_handle h = R_.clusters.add(std::move(b));
      bool fresh = R_.edge_base.emplace(we.e, h).second;
      assert(fresh);
      (void)fresh;
      for (vertex_id x : {we.e.u, we.e.v}) {
        shadow_cur_.capture(x, r0);
        slot* s = first_empty(r0.row(x));
        assert(s);
        *s = slot{slot_tag::edge, h};
        touched.insert(x);
      }
    }

    std::vector<vertex_id> a0(touched.begin(), touched.end());
    if (!faults_.skip_stranded_rule) {
      for (auto& [v, from] : stranded_at(0, r0, shadow_cur_, a0)) {
        a0.push_back(v);
        (void)from;  // seed components are singletons; no attribution needed
      }
      std::sort(a0.begin(), a0.end());
    }
    return a0;
  }

  // ---- per-round decision ----------------------------------------------

  struct decision {
    bool new_alive = false;
    std::int8_t deg = 0;
    bool contracts = false;
    action_kind act = action_kind::none;
  };

  bool outcome_changed(std::size_t idx) const {
    return dec_[idx].contracts || ocr(cur_[idx]) == round_;
  }

  void classify_and_decide() {
    const round_rows& rr = R_.rounds[round_];
    dec_.assign(cur_.size(), decision{});
    std::vector<vertex_id> members;
    for (std::size_t idx = 0; idx < cur_.size(); ++idx) {
      vertex_id v = cur_[idx];
      decision& d = dec_[idx];
      d.new_alive = rr.contains(v);
      if (!d.new_alive) continue;
      d.deg = std::int8_t(row_degree(rr.row(v)));
      if (d.deg == 0) {
        d.contracts = true;
        d.act = action_kind::finalize;
        continue;
      }
      if (d.deg > 2) continue;
      // An unaffected neighbor that contracted here before the update keeps
      // that contraction, so re-deciding v next to it would break
      // independence; v must keep waiting.
      bool blocked = false;
      for (const slot& s : rr.row(v)) {
        if (!s.counts_degree()) continue;
        vertex_id w = R_.slot_neighbor(v, s);
        if (!in_wave(w) && ocr(w) == round_) {
          blocked = true;
          break;
        }
      }
      if (!blocked) members.push_back(v);
    }

    std::vector<std::array<vertex_id, 2>> nbrs(members.size(),
                                               {nil_vertex, nil_vertex});
    for (std::size_t i = 0; i < members.size(); ++i) {
      int j = 0;
      for (const slot& s : rr.row(members[i])) {
        if (!s.counts_degree()) continue;
        vertex_id w = R_.slot_neighbor(members[i], s);
        if (std::binary_search(members.begin(), members.end(), w)) nbrs[i][j++] = w;
      }
    }
    for (vertex_id v : chain_mis(make_chain_graph(std::move(members), std::move(nbrs)),
                                 opt_.threads)) {
      std::size_t idx = wave_index(v);
      dec_[idx].contracts = true;
      dec_[idx].act = dec_[idx].deg == 1 ? action_kind::rake : action_kind::compress;
    }
  }

  void apply_decisions() {
    const round_rows& rr = R_.rounds[round_];
    for (std::size_t idx = 0; idx < cur_.size(); ++idx) {
      vertex_id v = cur_[idx];
      const decision& d = dec_[idx];
      if (d.contracts) {
        retire_superseded(v);
        make_composite(R_, v, d.act, rr.row(v), round_);
      } else if (ocr(v) == round_) {
        // Contracted here before the update but not any more. If v is still
        // alive its new contraction comes at a later round; clear the
        // decision so the record never carries a stale one.
        retire_superseded(v);
        if (d.new_alive) {
          R_.contract_round[v] = -1;
          R_.action[v] = action_kind::none;
          R_.vertex_cluster[v] = nil_cluster;
        }
      }
    }
  }

  // ---- row maintenance ---------------------------------------------------

  // Rewrites next-round rows for the wave's survivors and for every
  // unaffected surviving neighbor of a changed outcome, and drops rows of
  // wave members that no longer survive. Pre-images are captured into the
  // next round's shadow before any write.
  void rewrite_rows() {
    round_rows& cur_rr = R_.rounds[round_];
    round_rows& nxt_rr = R_.rounds[round_ + 1];

    std::set<vertex_id> rewrite;
    std::vector<vertex_id> drop;
    for (std::size_t idx = 0; idx < cur_.size(); ++idx) {
      vertex_id v = cur_[idx];
      const decision& d = dec_[idx];
      if (d.new_alive && !d.contracts)
        rewrite.insert(v);
      else
        drop.push_back(v);
      if (!outcome_changed(idx)) continue;
      auto note_neighbors = [&](std::span<const slot> row) {
        for (const slot& s : row) {
          if (!s.counts_degree()) continue;
          vertex_id u = R_.slot_neighbor(v, s);
          if (!in_wave(u) && ocr(u) != round_) rewrite.insert(u);
        }
      };
      if (shadow_cur_.alive(v, cur_rr)) note_neighbors(shadow_cur_.row(v, cur_rr));
      if (d.new_alive) note_neighbors(cur_rr.row(v));
    }

    for (vertex_id v : drop)
      if (nxt_rr.contains(v)) {
        shadow_next_.capture(v, nxt_rr);
        nxt_rr.erase(v);
      }
    for (vertex_id u : rewrite) {
      shadow_next_.capture(u, nxt_rr);
      if (!nxt_rr.contains(u)) nxt_rr.insert(u);
    }

    std::vector<vertex_id> ws(rewrite.begin(), rewrite.end());
    auto decide = [&](vertex_id w)
        -> std::optional<std::pair<action_kind, cluster_handle>> {
      std::size_t widx = wave_index(w);
      if (widx != npos) {
        if (!dec_[widx].contracts) return std::nullopt;
        return std::pair{dec_[widx].act, R_.vertex_cluster[w]};
      }
      if (R_.contract_round[w] != round_) return std::nullopt;
      return std::pair{R_.action[w], R_.vertex_cluster[w]};
    };
    parallel_for(ws.size(), opt_.threads, [&](std::size_t i) {
      vertex_id u = ws[i];
      std::span<const slot> src = cur_rr.row(u);
      std::span<slot> dst = nxt_rr.row(u);
      for (std::uint32_t j = 0; j < R_.cfg.t; ++j)
        dst[j] = next_slot(R_.clusters, u, src[j], decide);
    });
  }

  // ---- affected-set propagation ------------------------------------------

  // A vertex that survived the old round only because its contracting
  // neighbors beat it to the punch must re-decide once all of those
  // neighbors are re-deciding: its old survival may no longer be maximal.
  // Looks at the pre-update forest at round r; `members` is the affected
  // set at r discovered so far (sorted). Returns vertex -> sorted spreaders.
  std::vector<std::pair<vertex_id, std::vector<vertex_id>>> stranded_at(
      std::int32_t r, const round_rows& rr, const row_shadow& sh,
      const std::vector<vertex_id>& members) {
    std::map<vertex_id, std::vector<vertex_id>> found;
    for (vertex_id m : members) {
      if (ocr(m) != r || !sh.alive(m, rr)) continue;
      for (const slot& s : sh.row(m, rr)) {
        if (!s.counts_degree()) continue;
        vertex_id v = R_.slot_neighbor(m, s);
        if (found.count(v)) continue;
        if (std::binary_search(members.begin(), members.end(), v)) continue;
        if (!sh.alive(v, rr) || !rr.contains(v)) continue;
        if (ocr(v) == r) continue;
        bool all_affected = true;
        std::vector<vertex_id> from;
        for (const slot& s2 : sh.row(v, rr)) {
          if (!s2.counts_degree()) continue;
          vertex_id w = R_.slot_neighbor(v, s2);
          if (ocr(w) != r) continue;
          if (!std::binary_search(members.begin(), members.end(), w)) {
            all_affected = false;
            break;
          }
          from.push_back(w);
        }
        if (!all_affected || from.empty()) continue;
        std::sort(from.begin(), from.end());
        found.emplace(v, std::move(from));
      }
    }
    return {found.begin(), found.end()};
  }

  round_outcome propagate() {
    rewrite_rows();
    const round_rows& cur_rr = R_.rounds[round_];
    const round_rows& nxt_rr = R_.rounds[round_ + 1];

    // Candidates for next-round membership: the wave itself plus everything
    // adjacent, in either forest, to a changed outcome.
    std::set<vertex_id> cand(cur_.begin(), cur_.end());
    for (std::size_t idx = 0; idx < cur_.size(); ++idx) {
      vertex_id v = cur_[idx];
      if (!outcome_changed(idx)) continue;
      auto note = [&](std::span<const slot> row) {
        for (const slot& s : row)
          if (s.counts_degree()) cand.insert(R_.slot_neighbor(v, s));
      };
      if (shadow_cur_.alive(v, cur_rr)) note(shadow_cur_.row(v, cur_rr));
      if (dec_[idx].new_alive) note(cur_rr.row(v));
    }

    // A vertex stays affected if its next-round liveness differs between
    // the forests, or it is alive in both with different rows.
    round_outcome out;
    std::vector<vertex_id> keep;
    for (vertex_id v : cand) {
      bool old_alive = shadow_next_.alive(v, nxt_rr);
      bool new_alive = nxt_rr.contains(v);
      if (!old_alive && !new_alive) continue;
      if (old_alive == new_alive) {
        std::span<const slot> orow = shadow_next_.row(v, nxt_rr);
        std::span<const slot> nrow = nxt_rr.row(v);
        if (std::equal(orow.begin(), orow.end(), nrow.begin(), nrow.end())) continue;
      }
      keep.push_back(v);
    }

    for (vertex_id v : keep) {
      if (in_wave(v)) continue;
      // Newly affected: attribute to the wave members whose contraction,
      // old or new, it is adjacent to. Its row at this round is the same in
      // both forests, so the stored one serves.
      std::vector<vertex_id> from;
      for (const slot& s : cur_rr.row(v)) {
        if (!s.counts_degree()) continue;
        vertex_id u = R_.slot_neighbor(v, s);
        std::size_t j = wave_index(u);
        if (j == npos) continue;
        if (ocr(u) == round_ || dec_[j].contracts) from.push_back(u);
      }
      if (from.empty())
        throw invariant_error("newly affected vertex " + std::to_string(v) +
                              " has no spreader at round " + std::to_string(round_));
      std::sort(from.begin(), from.end());
      out.spread.emplace_back(v, std::move(from));
    }

    if (!faults_.skip_stranded_rule) {
      auto stranded = stranded_at(round_ + 1, nxt_rr, shadow_next_, keep);
      for (auto& [v, from] : stranded) {
        keep.push_back(v);
        if (!in_wave(v)) out.spread.emplace_back(v, std::move(from));
      }
      std::sort(keep.begin(), keep.end());
    }
    out.next = std::move(keep);
    return out;
  }

  // ---- rounds cleanup ------------------------------------------------------

  // Stored rounds are all nonempty; the update works against a scratch next
  // round that may end up empty, and a shrinking update can leave drained
  // old rounds at the tail. Intermediate rounds never drain: a forest with
  // any live vertex contracts at least one per round.
  void trim_rounds() {
    while (!R_.rounds.empty() && R_.rounds.back().size() == 0) R_.rounds.pop_back();
  }

  // ---- component instrumentation (debug_invariants) ----------------------

  // Components are grown exactly the way the size argument wants them
  // grown: one singleton per seed vertex, each newly affected vertex joins
  // every component that contains one of its spreaders, members that leave
  // the affected set leave their components. Groups may overlap.

  void tracker_seed(const std::vector<vertex_id>& a0, std::uint64_t k) {
    comp_.clear();
    comp_of_.clear();
    if (a0.size() > 6 * k)
      throw invariant_error("seed affected set has " + std::to_string(a0.size()) +
                            " vertices, above the 6k bound for k=" + std::to_string(k));
    for (vertex_id v : a0) {
      comp_of_[v] = {std::uint32_t(comp_.size())};
      comp_.push_back({v});
    }
  }

  void check_wave_shape(std::uint64_t k) {
    if (cur_.size() > 312 * k)
      throw invariant_error("affected set has " + std::to_string(cur_.size()) +
                            " vertices at round " + std::to_string(round_) +
                            ", above the 312k bound for k=" + std::to_string(k));
    const round_rows& rr = R_.rounds[round_];
    for (std::size_t j = 0; j < comp_.size(); ++j) {
      std::vector<vertex_id> old_side;
      for (vertex_id v : comp_[j])
        if (shadow_cur_.alive(v, rr)) old_side.push_back(v);
      if (old_side.size() > 26)
        throw invariant_error("component " + std::to_string(j) + " has " +
                              std::to_string(old_side.size()) +
                              " pre-update members at round " + std::to_string(round_) +
                              ", above 26");
      if (old_side.empty()) continue;

      // Induced pre-update adjacency on the component must be a tree, and
      // at most two members may border unaffected territory.
      std::map<vertex_id, std::vector<vertex_id>> adj;
      std::size_t edges = 0;
      int frontiers = 0;
      for (vertex_id v : old_side) {
        bool frontier = false;
        for (const slot& s : shadow_cur_.row(v, rr)) {
          if (!s.counts_degree()) continue;
          vertex_id u = R_.slot_neighbor(v, s);
          if (!in_wave(u)) frontier = true;
          if (std::binary_search(old_side.begin(), old_side.end(), u)) {
            adj[v].push_back(u);
            if (u > v) ++edges;
          }
        }
        frontiers += frontier;
      }
      if (frontiers > 2)
        throw invariant_error("component " + std::to_string(j) + " has " +
                              std::to_string(frontiers) + " frontier vertices at round " +
                              std::to_string(round_) + ", above 2");
      if (edges != old_side.size() - 1)
        throw invariant_error("component " + std::to_string(j) +
                              " does not induce a tree at round " + std::to_string(round_));
      std::set<vertex_id> seen{old_side.front()};
      std::vector<vertex_id> stack{old_side.front()};
      while (!stack.empty()) {
        vertex_id v = stack.back();
        stack.pop_back();
        for (vertex_id u : adj[v])
          if (seen.insert(u).second) stack.push_back(u);
      }
      if (seen.size() != old_side.size())
        throw invariant_error("component " + std::to_string(j) +
                              " induces a disconnected forest at round " +
                              std::to_string(round_));
    }
  }

  void tracker_advance(const round_outcome& out) {
    // Resolve attributions against the components as they stood this round,
    // before any filtering: a spreader may itself drop out. Assign each
    // newcomer's memberships as soon as they are known, since a later
    // spread entry may name it as a spreader.
    std::vector<std::pair<vertex_id, std::vector<std::uint32_t>>> placed;
    for (const auto& [v, from] : out.spread) {
      std::set<std::uint32_t> js;
      for (vertex_id u : from) {
        auto it = comp_of_.find(u);
        assert(it != comp_of_.end() && !it->second.empty());
        js.insert(it->second.begin(), it->second.end());
      }
      std::vector<std::uint32_t> jv(js.begin(), js.end());
      comp_of_[v] = jv;
      placed.emplace_back(v, std::move(jv));
    }
    for (auto& c : comp_)
      std::erase_if(c, [&](vertex_id v) {
        return !std::binary_search(out.next.begin(), out.next.end(), v);
      });
    std::erase_if(comp_of_, [&](const auto& kv) {
      return !std::binary_search(out.next.begin(), out.next.end(), kv.first);
    });
    std::unordered_map<std::uint32_t, std::uint32_t> grew;
    for (const auto& [v, js] : placed)
      for (std::uint32_t j : js) {
        auto pos = std::lower_bound(comp_[j].begin(), comp_[j].end(), v);
        if (pos == comp_[j].end() || *pos != v) comp_[j].insert(pos, v);
        if (++grew[j] > 4)
          throw invariant_error("component " + std::to_string(j) +
                                " grew by more than 4 at round " + std::to_string(round_));
      }
  }

  // ---- state ---------------------------------------------------------------

  contraction_record<A>& R_;
  update_options opt_;
  update_faults faults_;

  std::int32_t round_ = 0;
  std::vector<vertex_id> cur_;
  std::vector<decision> dec_;
  row_shadow shadow_cur_, shadow_next_;

  std::unordered_map<vertex_id, std::int32_t> old_round_;
  std::unordered_map<vertex_id, cluster_handle> old_cluster_;
  std::unordered_set<vertex_id> retired_;

  std::vector<std::vector<vertex_id>> comp_;
  std::unordered_map<vertex_id, std::vector<std::uint32_t>> comp_of_;
};

template <cluster_algebra A>
update_stats batch_update_injected(contraction_record<A>& R, const batch_edit& edit,
                                   const update_options& opt, const update_faults& f) {
  update_engine<A> eng(R, opt, f);
  basic_wave w;
  return eng.run(edit, w);
}

}  // namespace detail

template <cluster_algebra A>
update_stats batch_update(contraction_record<A>& R, const batch_edit& edit,
                          const update_options& opt = {}) {
  detail::update_engine<A> eng(R, opt, {});
  detail::basic_wave w;
  return eng.run(edit, w);
}

template <cluster_algebra A>
update_stats batch_update_phased(contraction_record<A>& R, const batch_edit& edit,
                                 const update_options& opt = {}) {
  detail::update_engine<A> eng(R, opt, {});
  detail::phased_wave w(R.cfg.n, edit.size());
  return eng.run(edit, w);
}

}  // namespace rctree
