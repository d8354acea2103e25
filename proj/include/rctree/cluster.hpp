#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "rctree/core.hpp"

// Cluster table. Base clusters wrap a single original edge; composite
// clusters are produced by contraction, one per vertex (its representative).
// Handles are indices into a pool and are never reused: retiring a cluster
// tombstones it in place, and the identity rules in the update engine decide
// when a recontraction may keep its old handle.

namespace rctree {

using cluster_handle = std::uint32_t;
inline constexpr cluster_handle nil_cluster = std::numeric_limits<cluster_handle>::max();

enum class cluster_kind : std::uint8_t { base, unary, binary, root };

enum class action_kind : std::uint8_t { none, rake, compress, finalize };

inline cluster_kind kind_of(action_kind a) {
  switch (a) {
    case action_kind::rake: return cluster_kind::unary;
    case action_kind::compress: return cluster_kind::binary;
    default: return cluster_kind::root;
  }
}

template <typename Value>
struct cluster {
  cluster_kind kind = cluster_kind::base;
  bool retired = false;
  vertex_id rep = nil_vertex;  // composite clusters only
  edge_id edge{};              // base clusters only
  weight_t edge_weight = 0;    // base clusters only
  // boundary[0..arity): base {u,v}; unary {w}; binary {a,b}; root {}
  std::array<vertex_id, 2> boundary{nil_vertex, nil_vertex};
  // the child whose cluster path leads to boundary[i]; meaningful for
  // composite kinds with a boundary (unary: [0], binary: both)
  std::array<cluster_handle, 2> spine_child{nil_cluster, nil_cluster};
  std::vector<cluster_handle> children;  // slot order at contraction time
  cluster_handle parent = nil_cluster;
  std::int32_t height = 0;      // base: 0; composite: contraction round + 1
  std::uint32_t spine_hops = 0; // base: 1; binary: edges on the boundary path
  Value value{};

  int boundary_arity() const {
    switch (kind) {
      case cluster_kind::base:
      case cluster_kind::binary: return 2;
      case cluster_kind::unary: return 1;
      case cluster_kind::root: return 0;
    }
    return 0;
  }
  bool on_boundary(vertex_id v) const {
    int arity = boundary_arity();
    for (int i = 0; i < arity; ++i)
      if (boundary[i] == v) return true;
    return false;
  }
  vertex_id other_boundary(vertex_id v) const {
    assert(boundary_arity() == 2);
    return boundary[0] == v ? boundary[1] : boundary[0];
  }
};

template <typename Value>
class cluster_store {
 public:
  cluster_handle add(cluster<Value> c) {
    pool_.push_back(std::move(c));
    ++live_;
    return cluster_handle(pool_.size() - 1);
  }
  void retire(cluster_handle h) {
    assert(!pool_[h].retired);
    pool_[h].retired = true;
    --live_;
  }
  cluster<Value>& operator[](cluster_handle h) { return pool_[h]; }
  const cluster<Value>& operator[](cluster_handle h) const { return pool_[h]; }
  std::size_t pool_size() const { return pool_.size(); }
  std::uint64_t live_count() const { return live_; }

 private:
  std::vector<cluster<Value>> pool_;
  std::uint64_t live_ = 0;
};

// Aggregation interface. Combines see the structure the contraction saw:
// the spine children (toward each boundary) separately from raked-on unary
// children, plus the representative vertex, so path partials can be kept
// alongside plain totals. All functions must be pure.
template <typename A>
concept cluster_algebra = requires(const A a, edge_id e, weight_t w, vertex_id v,
                                   std::span<const typename A::value> kids,
                                   const typename A::value& x) {
  typename A::value;
  { a.edge_value(e, w) } -> std::same_as<typename A::value>;
  { a.rake_combine(x, kids, v, v) } -> std::same_as<typename A::value>;
  { a.compress_combine(x, x, kids, v, v, v) } -> std::same_as<typename A::value>;
  { a.root_combine(kids, v) } -> std::same_as<typename A::value>;
};

}  // namespace rctree
