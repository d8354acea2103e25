#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rctree/batch_update.hpp"
#include "rctree/core.hpp"
#include "rctree/queries.hpp"

// Text formats spoken by the command-line tools, plus the JSON shape for
// update statistics (that one pulls in the vendored nlohmann header).
//
//   forest   first line "n t", then one edge per line: "u v" or "u v w"
//   batch    "+ u v [w]" inserts an edge, "- u v" deletes one
//   queries  "conn u v" | "subtree r c" | "psum u v" | "pmax u v"
//            | "pmin u v" | "lca r u v"
//
// Blank lines are skipped and '#' starts a comment. Parsers check syntax
// only and report "name:line: ..." on failure; semantic checks (ranges,
// degrees, cycles) stay with validate_forest / validate_batch so the same
// rules apply to programmatic input.

namespace rctree {

struct io_error : error {
  using error::error;
};

struct forest_input {
  forest_config cfg;
  std::vector<weighted_edge> edges;
};

namespace detail {

// '#' comments off, whitespace tokens out.
inline std::vector<std::string_view> line_tokens(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos)
    line = line.substr(0, hash);
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
      ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

[[noreturn]] inline void parse_fail(const std::string& name, std::size_t ln,
                                    const std::string& msg) {
  throw io_error(name + ":" + std::to_string(ln) + ": " + msg);
}

template <typename T>
T parse_number(std::string_view tok, const std::string& name, std::size_t ln,
               const char* what) {
  T out{};
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    parse_fail(name, ln, std::string("bad ") + what + " '" + std::string(tok) + "'");
  return out;
}

// Drives a line-based parser: calls fn(tokens, line_number) for each
// non-empty line.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  for (std::size_t ln = 1; std::getline(in, line); ++ln) {
    auto toks = line_tokens(line);
    if (!toks.empty()) fn(toks, ln);
  }
}

}  // namespace detail

inline forest_input parse_forest(std::istream& in,
                                 const std::string& name = "<forest>") {
  forest_input f;
  bool have_header = false;
  detail::for_each_line(in, [&](const std::vector<std::string_view>& t, std::size_t ln) {
    if (!have_header) {
      if (t.size() != 2) detail::parse_fail(name, ln, "expected header 'n t'");
      f.cfg.n = detail::parse_number<std::uint32_t>(t[0], name, ln, "vertex count");
      f.cfg.t = detail::parse_number<std::uint32_t>(t[1], name, ln, "degree bound");
      if (f.cfg.t == 0) detail::parse_fail(name, ln, "degree bound must be positive");
      have_header = true;
      return;
    }
    if (t.size() != 2 && t.size() != 3)
      detail::parse_fail(name, ln, "expected edge 'u v' or 'u v w'");
    vertex_id u = detail::parse_number<vertex_id>(t[0], name, ln, "vertex");
    vertex_id v = detail::parse_number<vertex_id>(t[1], name, ln, "vertex");
    weight_t w = t.size() == 3
                     ? detail::parse_number<weight_t>(t[2], name, ln, "weight")
                     : 1;
    f.edges.push_back({edge_id(u, v), w});
  });
  if (!have_header) detail::parse_fail(name, 1, "missing header 'n t'");
  return f;
}

inline batch_edit parse_batch(std::istream& in,
                              const std::string& name = "<batch>") {
  batch_edit b;
  detail::for_each_line(in, [&](const std::vector<std::string_view>& t, std::size_t ln) {
    if (t[0] == "+") {
      if (t.size() != 3 && t.size() != 4)
        detail::parse_fail(name, ln, "expected '+ u v' or '+ u v w'");
      vertex_id u = detail::parse_number<vertex_id>(t[1], name, ln, "vertex");
      vertex_id v = detail::parse_number<vertex_id>(t[2], name, ln, "vertex");
      weight_t w = t.size() == 4
                       ? detail::parse_number<weight_t>(t[3], name, ln, "weight")
                       : 1;
      b.insert.push_back({edge_id(u, v), w});
    } else if (t[0] == "-") {
      if (t.size() != 3) detail::parse_fail(name, ln, "expected '- u v'");
      vertex_id u = detail::parse_number<vertex_id>(t[1], name, ln, "vertex");
      vertex_id v = detail::parse_number<vertex_id>(t[2], name, ln, "vertex");
      b.erase.push_back(edge_id(u, v));
    } else {
      detail::parse_fail(name, ln, "edit must start with '+' or '-'");
    }
  });
  return b;
}

inline std::vector<query_request> parse_queries(
    std::istream& in, const std::string& name = "<queries>") {
  using kind = query_request::kind;
  std::vector<query_request> qs;
  detail::for_each_line(in, [&](const std::vector<std::string_view>& t, std::size_t ln) {
    query_request q;
    std::size_t want = 3;
    if (t[0] == "conn") q.k = kind::connected;
    else if (t[0] == "subtree") q.k = kind::subtree;
    else if (t[0] == "psum") q.k = kind::path_sum;
    else if (t[0] == "pmin") q.k = kind::path_min;
    else if (t[0] == "pmax") q.k = kind::path_max;
    else if (t[0] == "lca") q.k = kind::lca, want = 4;
    else detail::parse_fail(name, ln, "unknown query '" + std::string(t[0]) + "'");
    if (t.size() != want)
      detail::parse_fail(name, ln, std::string(t[0]) + " takes " +
                                       std::to_string(want - 1) + " vertex arguments");
    // lca reads "lca root u v"; everything else reads two vertices
    std::size_t i = 1;
    if (q.k == kind::lca)
      q.c = detail::parse_number<vertex_id>(t[i++], name, ln, "vertex");
    q.a = detail::parse_number<vertex_id>(t[i++], name, ln, "vertex");
    q.b = detail::parse_number<vertex_id>(t[i++], name, ln, "vertex");
    qs.push_back(q);
  });
  return qs;
}

inline forest_input load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open forest file '" + path + "'");
  return parse_forest(in, path);
}

inline batch_edit load_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open batch file '" + path + "'");
  return parse_batch(in, path);
}

inline std::vector<query_request> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open query file '" + path + "'");
  return parse_queries(in, path);
}

inline void write_forest(std::ostream& out, const forest_config& cfg,
                         const std::vector<weighted_edge>& edges) {
  out << cfg.n << ' ' << cfg.t << '\n';
  for (const weighted_edge& we : edges)
    out << we.e.u << ' ' << we.e.v << ' ' << we.w << '\n';
}

inline void write_batch(std::ostream& out, const batch_edit& b) {
  for (const edge_id& e : b.erase) out << "- " << e.u << ' ' << e.v << '\n';
  for (const weighted_edge& we : b.insert)
    out << "+ " << we.e.u << ' ' << we.e.v << ' ' << we.w << '\n';
}

inline const char* query_error_name(query_error::kind k) {
  switch (k) {
    case query_error::kind::not_connected: return "not-connected";
    case query_error::kind::not_adjacent: return "not-adjacent";
    case query_error::kind::same_vertex: return "same-vertex";
    case query_error::kind::dead_vertex: return "dead-vertex";
    case query_error::kind::invalid_vertex: return "invalid-vertex";
    case query_error::kind::malformed_chain: return "malformed-chain";
  }
  return "unknown";
}

// One line per answer, matching query order:
//   conn          -> "true" / "false"
//   subtree, psum -> the aggregate
//   pmin, pmax    -> "u v w" of the chosen edge
//   lca           -> the vertex id
// A failed element reports "error: <kind>" without disturbing its peers.
inline std::string format_answer(const query_answer& a) {
  if (!a.ok()) return std::string("error: ") + query_error_name(*a.err);
  struct visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(weight_t w) const { return std::to_string(w); }
    std::string operator()(vertex_id v) const { return std::to_string(v); }
    std::string operator()(const std::pair<edge_id, weight_t>& p) const {
      return std::to_string(p.first.u) + ' ' + std::to_string(p.first.v) + ' ' +
             std::to_string(p.second);
    }
  };
  return std::visit(visitor{}, *a.value);
}

// {k, rounds, per_round_affected, total_touched, wall_time_ns}
inline nlohmann::json update_stats_json(const update_stats& s) {
  return nlohmann::json{{"k", s.k},
                        {"rounds", s.rounds},
                        {"per_round_affected", s.per_round_affected},
                        {"total_touched", s.total_touched},
                        {"wall_time_ns", s.wall_time_ns}};
}

}  // namespace rctree
