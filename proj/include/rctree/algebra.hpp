#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>

#include "rctree/cluster.hpp"
#include "rctree/core.hpp"

namespace rctree {

// Extreme-weight edge with a canonical tie rule (smaller edge id wins) so
// results never depend on combine order.
struct extreme_edge {
  edge_id e{};
  weight_t w = 0;
  bool present = false;

  friend bool operator==(const extreme_edge&, const extreme_edge&) = default;
};

inline extreme_edge min_edge(const extreme_edge& a, const extreme_edge& b) {
  if (!a.present) return b;
  if (!b.present) return a;
  if (a.w != b.w) return a.w < b.w ? a : b;
  return a.e < b.e ? a : b;
}

inline extreme_edge max_edge(const extreme_edge& a, const extreme_edge& b) {
  if (!a.present) return b;
  if (!b.present) return a;
  if (a.w != b.w) return a.w > b.w ? a : b;
  return a.e < b.e ? a : b;
}

// Which vertices a path sum charges, besides its edges.
enum class path_vertex_mode : std::uint8_t {
  edges_only,  // sum of edge weights
  interior,    // + values of vertices strictly between the endpoints
  all,         // + endpoint values too (queries add those at the top)
};

// Per-cluster summary kept by the standard algebra: a total over everything
// the cluster swallowed, plus path partials along the boundary spine.
struct weight_summary {
  weight_t total = 0;      // edges + interior vertex values inside the cluster
  weight_t spine_sum = 0;  // boundary-to-boundary path (binary clusters)
  extreme_edge spine_min{};
  extreme_edge spine_max{};

  friend bool operator==(const weight_summary&, const weight_summary&) = default;
};

// Sums and min/max over weighted paths and subtrees. Vertex values come from
// a plain function pointer so the algebra stays trivially copyable; mode
// picks which vertices a path query includes.
struct standard_algebra {
  using value = weight_summary;

  path_vertex_mode mode = path_vertex_mode::edges_only;
  weight_t (*vertex_fn)(vertex_id) = nullptr;

  weight_t vertex_value(vertex_id v) const { return vertex_fn ? vertex_fn(v) : 0; }
  path_vertex_mode path_mode() const { return mode; }

  value edge_value(edge_id e, weight_t w) const {
    value x;
    x.total = w;
    x.spine_sum = w;
    x.spine_min = {e, w, true};
    x.spine_max = {e, w, true};
    return x;
  }

  value rake_combine(const value& toward, std::span<const value> unaries,
                     vertex_id rep, vertex_id) const {
    value x;
    x.total = toward.total + vertex_value(rep);
    for (const value& u : unaries) x.total += u.total;
    // a unary cluster has no boundary-to-boundary path
    return x;
  }

  value compress_combine(const value& left, const value& right,
                         std::span<const value> unaries, vertex_id rep,
                         vertex_id, vertex_id) const {
    value x;
    x.total = left.total + right.total + vertex_value(rep);
    for (const value& u : unaries) x.total += u.total;
    x.spine_sum = left.spine_sum + right.spine_sum;
    if (mode != path_vertex_mode::edges_only) x.spine_sum += vertex_value(rep);
    x.spine_min = min_edge(left.spine_min, right.spine_min);
    x.spine_max = max_edge(left.spine_max, right.spine_max);
    return x;
  }

  value root_combine(std::span<const value> unaries, vertex_id rep) const {
    value x;
    x.total = vertex_value(rep);
    for (const value& u : unaries) x.total += u.total;
    return x;
  }
};

static_assert(cluster_algebra<standard_algebra>);

// Counts edges per cluster. Exists to keep the library honest about being
// generic in the algebra; also handy in tests (total must equal cluster size).
struct counting_algebra {
  using value = std::uint64_t;

  value edge_value(edge_id, weight_t) const { return 1; }
  value rake_combine(const value& toward, std::span<const value> unaries,
                     vertex_id, vertex_id) const {
    return toward + std::accumulate(unaries.begin(), unaries.end(), value{0});
  }
  value compress_combine(const value& left, const value& right,
                         std::span<const value> unaries, vertex_id, vertex_id,
                         vertex_id) const {
    return left + right + std::accumulate(unaries.begin(), unaries.end(), value{0});
  }
  value root_combine(std::span<const value> unaries, vertex_id) const {
    return std::accumulate(unaries.begin(), unaries.end(), value{0});
  }
};

static_assert(cluster_algebra<counting_algebra>);

}  // namespace rctree
