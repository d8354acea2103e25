#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Shared vocabulary for the whole library: vertex/edge identities, the
// forest configuration, batch edit descriptions, and the error taxonomy.

namespace rctree {

using vertex_id = std::uint32_t;
using weight_t = std::int64_t;

inline constexpr vertex_id nil_vertex = std::numeric_limits<vertex_id>::max();

// Undirected edge identity, canonical form u < v.
struct edge_id {
  vertex_id u = nil_vertex;
  vertex_id v = nil_vertex;

  edge_id() = default;
  edge_id(vertex_id a, vertex_id b) : u(a < b ? a : b), v(a < b ? b : a) {}

  vertex_id other(vertex_id x) const { return x == u ? v : u; }
  bool has(vertex_id x) const { return x == u || x == v; }
  std::uint64_t packed() const { return (std::uint64_t(u) << 32) | v; }

  friend bool operator==(const edge_id&, const edge_id&) = default;
  friend auto operator<=>(const edge_id& a, const edge_id& b) {
    return a.packed() <=> b.packed();
  }
};

struct weighted_edge {
  edge_id e;
  weight_t w = 1;
};

struct forest_config {
  std::uint32_t n = 0;  // vertices are ids 0..n-1
  std::uint32_t t = 3;  // adjacency slots per vertex; degree bound
};

// One batch of edits. Insertions carry weights; identities must be disjoint
// from the deletions.
struct batch_edit {
  std::vector<weighted_edge> insert;
  std::vector<edge_id> erase;

  std::size_t size() const { return insert.size() + erase.size(); }
  bool empty() const { return insert.empty() && erase.empty(); }
};

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Batch validation failures. The whole batch is rejected; `edge` names the
// first offending edit in batch order.
struct validation_error : error {
  enum class kind { cycle, degree_overflow, missing_edge, duplicate_edge };
  kind what_kind;
  edge_id edge;

  validation_error(kind k, edge_id e, const std::string& msg)
      : error(msg), what_kind(k), edge(e) {}
};

struct query_error : error {
  enum class kind {
    not_connected,
    not_adjacent,
    same_vertex,
    dead_vertex,
    invalid_vertex,
    malformed_chain,
  };
  kind what_kind;

  query_error(kind k, const std::string& msg) : error(msg), what_kind(k) {}
};

struct invariant_error : error {
  using error::error;
};

// Smallest r >= 0 with (6/5)^r >= x. Round-count bounds all live on this
// base because one contraction round keeps at most 5/6 of each tree.
inline std::uint32_t ceil_log_6_5(long double x) {
  std::uint32_t r = 0;
  long double p = 1.0L;
  while (p < x) {
    p *= 1.2L;
    ++r;
  }
  return r;
}

inline void require_vertex(vertex_id v, std::uint32_t n, const char* where) {
  if (v >= n)
    throw query_error(query_error::kind::invalid_vertex,
                      std::string(where) + ": vertex " + std::to_string(v) +
                          " out of range [0," + std::to_string(n) + ")");
}

}  // namespace rctree
