#pragma once

#include <string>

#include "rctree/algebra.hpp"
#include "rctree/contraction.hpp"

// Canonical text serialization of a record and its cluster forest. Clusters
// are named structurally (base edges by endpoints, composites by their
// representative vertex), never by handle, so two structurally identical
// states serialize to identical bytes no matter how they were produced.
// Round sections are round-major, vertex-id-minor; the cluster section lists
// base clusters in edge order, then composites in representative order.

namespace rctree {

namespace detail {

inline void append_value(std::string& out, std::uint64_t v) { out += std::to_string(v); }

inline void append_value(std::string& out, const weight_summary& v) {
  out += "T=";
  out += std::to_string(v.total);
  out += " S=";
  out += std::to_string(v.spine_sum);
  auto ext = [&](const char* tag, const extreme_edge& e) {
    out += tag;
    if (!e.present) {
      out += "-";
      return;
    }
    out += "(";
    out += std::to_string(e.e.u);
    out += ",";
    out += std::to_string(e.e.v);
    out += ")=";
    out += std::to_string(e.w);
  };
  out += " ";
  ext("m", v.spine_min);
  out += " ";
  ext("M", v.spine_max);
}

template <typename V>
void append_cluster_name(std::string& out, const cluster<V>& c) {
  if (c.kind == cluster_kind::base) {
    out += "E(";
    out += std::to_string(c.edge.u);
    out += ",";
    out += std::to_string(c.edge.v);
    out += ")";
  } else {
    out += "C(";
    out += std::to_string(c.rep);
    out += ")";
  }
}

inline const char* kind_name(cluster_kind k) {
  switch (k) {
    case cluster_kind::base: return "base";
    case cluster_kind::unary: return "unary";
    case cluster_kind::binary: return "binary";
    default: return "root";
  }
}

}  // namespace detail

template <cluster_algebra A>
std::string serialize_record(const contraction_record<A>& R) {
  std::string out;
  out += "record n=" + std::to_string(R.cfg.n) + " t=" + std::to_string(R.cfg.t) +
         " rounds=" + std::to_string(R.round_count()) + "\n";
  for (std::size_t r = 0; r < R.round_count(); ++r) {
    const round_rows& rows = R.rounds[r];
    out += "round " + std::to_string(r) + " live=" + std::to_string(rows.size()) + "\n";
    for (vertex_id v : rows.vertices_sorted()) {
      out += "  " + std::to_string(v) + ":";
      for (const slot& s : rows.row(v)) {
        out += " ";
        switch (s.tag) {
          case slot_tag::empty:
            out += ".";
            break;
          case slot_tag::edge: {
            const edge_id& e = R.clusters[s.h].edge;
            out += "e(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
            break;
          }
          case slot_tag::binary:
            out += "b(" + std::to_string(R.clusters[s.h].rep) + ")";
            break;
          case slot_tag::unary:
            out += "u(" + std::to_string(R.clusters[s.h].rep) + ")";
            break;
        }
      }
      out += "\n";
    }
  }
  return out;
}

template <cluster_algebra A>
std::string serialize_tree(const contraction_record<A>& R) {
  std::string out;
  out += "tree clusters=" + std::to_string(R.clusters.live_count()) +
         " edges=" + std::to_string(R.edge_base.size()) + "\n";
  auto emit = [&](cluster_handle h) {
    const auto& c = R.clusters[h];
    detail::append_cluster_name(out, c);
    out += " ";
    out += detail::kind_name(c.kind);
    out += " h=" + std::to_string(c.height);
    if (c.kind == cluster_kind::base) out += " w=" + std::to_string(c.edge_weight);
    if (c.kind == cluster_kind::binary || c.kind == cluster_kind::base)
      out += " hops=" + std::to_string(c.spine_hops);
    int arity = c.boundary_arity();
    if (arity > 0) {
      out += " bnd=(";
      for (int i = 0; i < arity; ++i) {
        if (i) out += ",";
        out += std::to_string(c.boundary[i]);
      }
      out += ")";
    }
    if (c.kind != cluster_kind::base) {
      out += " kids=[";
      for (std::size_t i = 0; i < c.children.size(); ++i) {
        if (i) out += " ";
        detail::append_cluster_name(out, R.clusters[c.children[i]]);
      }
      out += "]";
    }
    out += " up=";
    if (c.parent == nil_cluster)
      out += "-";
    else
      detail::append_cluster_name(out, R.clusters[c.parent]);
    out += " val=[";
    detail::append_value(out, c.value);
    out += "]\n";
  };
  for (const auto& [e, h] : R.edge_base) emit(h);
  for (vertex_id v = 0; v < R.cfg.n; ++v)
    if (R.vertex_cluster[v] != nil_cluster) emit(R.vertex_cluster[v]);
  return out;
}

template <cluster_algebra A>
std::string serialize_all(const contraction_record<A>& R) {
  return serialize_record(R) + serialize_tree(R);
}

// Graphviz view of the cluster forest, for the CLI's debug dump.
template <cluster_algebra A>
std::string to_dot(const contraction_record<A>& R) {
  std::string out = "digraph rc {\n  rankdir=BT;\n";
  auto name = [&](cluster_handle h) {
    std::string s = "\"";
    detail::append_cluster_name(s, R.clusters[h]);
    s += "\"";
    return s;
  };
  for (cluster_handle h = 0; h < R.clusters.pool_size(); ++h) {
    const auto& c = R.clusters[h];
    if (c.retired) continue;
    out += "  " + name(h) + " [shape=" +
           (c.kind == cluster_kind::base     ? "box"
            : c.kind == cluster_kind::unary  ? "ellipse"
            : c.kind == cluster_kind::binary ? "hexagon"
                                             : "doublecircle") +
           "];\n";
    if (c.parent != nil_cluster) out += "  " + name(h) + " -> " + name(c.parent) + ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace rctree
