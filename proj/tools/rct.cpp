// Command-line workbench around the library: build forests statically,
// apply batch edits, answer query files, run the invariant sweep, and
// produce bench numbers. Exit codes: 0 success, 1 validation failure,
// 2 invariant failure, 3 I/O or parse trouble.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oracle.hpp"
#include "rctree/forest.hpp"
#include "rctree/generators.hpp"
#include "rctree/io.hpp"
#include "rctree/serialize.hpp"
#include "rctree/validate.hpp"

using namespace rctree;

namespace {

struct run_config {
  std::string input;
  std::string gen_spec;
  std::vector<std::string> batches;
  std::string queries_path;
  std::string executor = "basic";
  unsigned threads = 1;
  bool debug = false;
  std::string dump_path;
  std::string format = "json";
  bool executor_chosen = false;
};

forest_options options_of(const run_config& rc) {
  forest_options o;
  o.executor = rc.executor == "phased" ? executor_kind::phased : executor_kind::basic;
  o.threads = rc.threads;
  o.debug_invariants = rc.debug;
  return o;
}

std::uint64_t ns_since(std::chrono::steady_clock::time_point t0) {
  return std::uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count());
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return x;
}

struct gen_spec {
  std::string shape;
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
};

gen_spec parse_gen(const std::string& s) {
  auto a = s.find(':');
  auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (b == std::string::npos || s.find(':', b + 1) != std::string::npos)
    throw io_error("--gen expects shape:n:seed, got '" + s + "'");
  auto n = parse_u64(std::string_view(s).substr(a + 1, b - a - 1));
  auto seed = parse_u64(std::string_view(s).substr(b + 1));
  if (!n || !seed || *n > 0xffffffffull)
    throw io_error("--gen expects numeric n and seed in '" + s + "'");
  return {s.substr(0, a), std::uint32_t(*n), *seed};
}

// --input and --gen are alternatives; every command that needs a forest
// takes exactly one.
forest_input obtain_forest(const run_config& rc) {
  if (rc.input.empty() == rc.gen_spec.empty())
    throw io_error("provide exactly one of --input or --gen");
  if (!rc.input.empty()) return load_forest(rc.input);
  gen_spec g = parse_gen(rc.gen_spec);
  forest_input f;
  f.cfg = {g.n, 3};
  f.edges = gen_forest(g.shape, g.n, 3, g.seed);
  return f;
}

// Deterministic per-command randomness: the generator seed when there is
// one, a fixed constant for file input.
std::uint64_t session_seed(const run_config& rc) {
  return rc.gen_spec.empty() ? 1 : parse_gen(rc.gen_spec).seed;
}

using forest = rc_forest<standard_algebra>;

void maybe_dump(const run_config& rc, const forest& f) {
  if (rc.dump_path.empty()) return;
  std::ofstream out(rc.dump_path);
  if (!out) throw io_error("cannot write dump file '" + rc.dump_path + "'");
  write_forest(out, f.record().cfg, f.edges());
}

// Line number of the first batch-file edit naming this edge, for error
// messages; 0 when it cannot be found.
std::size_t locate_edit_line(const std::string& path, edge_id e) {
  std::ifstream in(path);
  std::string line;
  for (std::size_t ln = 1; std::getline(in, line); ++ln) {
    auto toks = detail::line_tokens(line);
    if (toks.size() < 3 || (toks[0] != "+" && toks[0] != "-")) continue;
    auto u = parse_u64(toks[1]), v = parse_u64(toks[2]);
    if (u && v && edge_id(vertex_id(*u), vertex_id(*v)) == e) return ln;
  }
  return 0;
}

// Applies one batch file, translating a rejection into "file:line: why".
update_stats apply_batch_file(forest& f, const std::string& path) {
  batch_edit b = load_batch(path);
  try {
    return f.apply(std::move(b));
  } catch (const validation_error& e) {
    std::size_t ln = locate_edit_line(path, e.edge);
    throw validation_error(e.what_kind, e.edge,
                           path + ":" + (ln ? std::to_string(ln) : "?") + ": " +
                               e.what());
  }
}

int cmd_build(const run_config& rc) {
  forest_input fi = obtain_forest(rc);
  auto t0 = std::chrono::steady_clock::now();
  forest f(fi.cfg, fi.edges, {}, options_of(rc));
  std::uint64_t wall = ns_since(t0);

  const auto& R = f.record();
  if (rc.debug) {
    check_record(R);
    check_shrink(R);
  }
  std::vector<std::uint64_t> live;
  for (std::size_t r = 0; r < R.round_count(); ++r)
    live.push_back(R.rounds[r].size());
  const std::uint64_t n = fi.cfg.n;
  const std::uint64_t m = f.edge_count();
  const std::uint64_t bound =
      ceil_log_6_5((long double)std::max<std::uint32_t>(fi.cfg.n, 1)) + 1;

  if (rc.format == "csv") {
    std::cout << "n,t,edges,rounds,clusters,wall_ns\n"
              << n << ',' << fi.cfg.t << ',' << m << ',' << R.round_count()
              << ',' << R.clusters.live_count() << ',' << wall << '\n';
  } else {
    nlohmann::json j{{"n", n},
                     {"t", fi.cfg.t},
                     {"edges", m},
                     {"rounds", R.round_count()},
                     {"round_bound", bound},
                     {"clusters", R.clusters.live_count()},
                     {"per_round_live", live},
                     {"wall_time_ns", wall}};
    std::cout << j.dump() << '\n';
  }
  maybe_dump(rc, f);

  if (R.round_count() > bound) {
    std::cerr << "invariant: " << R.round_count() << " rounds exceed the bound "
              << bound << '\n';
    return 2;
  }
  if (R.clusters.live_count() != n + m) {
    std::cerr << "invariant: cluster census " << R.clusters.live_count()
              << " != n + m = " << (n + m) << '\n';
    return 2;
  }
  return 0;
}

int cmd_update(const run_config& rc) {
  if (rc.batches.empty()) throw io_error("update needs at least one --batch file");
  forest_input fi = obtain_forest(rc);
  forest f(fi.cfg, fi.edges, {}, options_of(rc));

  const bool csv = rc.format == "csv";
  if (csv) std::cout << "k,rounds,total_touched,wall_ns\n";
  for (const std::string& path : rc.batches) {
    update_stats s = apply_batch_file(f, path);
    if (csv)
      std::cout << s.k << ',' << s.rounds << ',' << s.total_touched << ','
                << s.wall_time_ns << '\n';
    else
      std::cout << update_stats_json(s).dump() << '\n';
  }
  maybe_dump(rc, f);
  return 0;
}

int cmd_query(const run_config& rc) {
  if (rc.queries_path.empty()) throw io_error("query needs a --queries file");
  forest_input fi = obtain_forest(rc);
  forest f(fi.cfg, fi.edges, {}, options_of(rc));
  for (const std::string& path : rc.batches) apply_batch_file(f, path);

  auto qs = load_queries(rc.queries_path);
  for (const query_answer& a : f.run(qs)) std::cout << format_answer(a) << '\n';
  maybe_dump(rc, f);
  return 0;
}

// ------------------------------------------------------------------
// check: the self-audit sweep. Every step prints one line; the first
// failure stops the run with its detail.

weight_t zero_vertex(oracle::vertex) { return 0; }

// Random queries of every kind against the brute-force oracle. Returns the
// first disagreement.
std::optional<std::string> query_mismatch(const forest& f,
                                          const oracle::naive_forest& nf,
                                          std::mt19937_64& rng, int samples) {
  const std::uint32_t n = f.vertex_count();
  if (n == 0) return std::nullopt;
  auto pair_text = [](vertex_id u, vertex_id v) {
    return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
  };
  for (int i = 0; i < samples; ++i) {
    vertex_id u = vertex_id(rng() % n), v = vertex_id(rng() % n);
    bool conn = oracle::oracle_connected(nf, u, v);
    if (f.connected(u, v) != conn) return "connected" + pair_text(u, v);
    if (conn) {
      if (f.path_sum(u, v) != *oracle::oracle_path_sum(nf, u, v, 0, zero_vertex))
        return "path_sum" + pair_text(u, v);
      if (u != v) {
        for (bool mx : {false, true}) {
          auto got = f.path_extreme_edge(u, v, mx);
          auto want = *oracle::oracle_path_extreme(nf, u, v, mx);
          if (got.first.u != want.first.first || got.first.v != want.first.second ||
              got.second != want.second)
            return std::string(mx ? "path_max" : "path_min") + pair_text(u, v);
        }
      }
      vertex_id r = vertex_id(rng() % n);
      if (oracle::oracle_connected(nf, r, u) &&
          f.lca(r, u, v) != *oracle::oracle_lca(nf, r, u, v))
        return "lca" + pair_text(u, v) + " under " + std::to_string(r);
    }
    if (!nf.adj[u].empty()) {
      auto it = nf.adj[u].begin();
      std::advance(it, long(rng() % nf.adj[u].size()));
      vertex_id c = *it;
      if (f.subtree_sum(u, c) != *oracle::oracle_subtree_sum(nf, u, c, zero_vertex))
        return "subtree_sum" + pair_text(u, c);
    }
  }
  return std::nullopt;
}

int cmd_check(const run_config& rc) {
  forest_input fi = obtain_forest(rc);
  std::mt19937_64 rng(session_seed(rc) ^ 0xc0ffee);
  int failures = 0;
  auto report = [&](const std::string& name, const std::optional<std::string>& why) {
    if (why) {
      std::cout << "FAIL: " << name << ": " << *why << '\n';
      ++failures;
    } else {
      std::cout << "ok: " << name << '\n';
    }
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    if (failures) return;  // first failure is the story; stop there
    try {
      report(name, body());
    } catch (const error& e) {
      report(name, std::string(e.what()));
    }
  };

  forest_options base = options_of(rc);
  base.debug_invariants = true;

  forest_options basic = base;
  basic.executor = executor_kind::basic;
  forest f(fi.cfg, fi.edges, {}, basic);

  guarded("static build invariants", [&]() -> std::optional<std::string> {
    check_record(f.record());
    check_shrink(f.record());
    return std::nullopt;
  });

  guarded("round bound", [&]() -> std::optional<std::string> {
    std::uint64_t bound =
        ceil_log_6_5((long double)std::max<std::uint32_t>(fi.cfg.n, 1)) + 1;
    if (f.record().round_count() > bound)
      return std::to_string(f.record().round_count()) + " rounds > " +
             std::to_string(bound);
    return std::nullopt;
  });

  guarded("cluster census", [&]() -> std::optional<std::string> {
    std::uint64_t want = std::uint64_t(fi.cfg.n) + f.edge_count();
    if (f.record().clusters.live_count() != want)
      return std::to_string(f.record().clusters.live_count()) + " != " +
             std::to_string(want);
    return std::nullopt;
  });

  guarded("determinism across executors and threads", [&]() -> std::optional<std::string> {
    std::string want = serialize_record(f.record());
    forest_options o = base;
    o.executor = executor_kind::phased;
    forest g(fi.cfg, fi.edges, {}, o);
    if (serialize_record(g.record()) != want) return "phased build differs";
    for (unsigned th : {2u, 8u}) {
      forest_options ot = basic;
      ot.threads = th;
      forest h(fi.cfg, fi.edges, {}, ot);
      if (serialize_record(h.record()) != want)
        return "threads=" + std::to_string(th) + " build differs";
    }
    return std::nullopt;
  });

  auto nf = [&] {
    oracle::naive_forest o(fi.cfg.n);
    for (const auto& we : fi.edges) o.insert(we.e.u, we.e.v, we.w);
    return o;
  }();

  guarded("queries agree with the oracle", [&]() -> std::optional<std::string> {
    return query_mismatch(f, nf, rng, 200);
  });

  guarded("update session stays sound", [&]() -> std::optional<std::string> {
    forest_options o = base;
    o.executor = executor_kind::phased;
    forest g(fi.cfg, fi.edges, {}, o);
    auto edges = fi.edges;
    const std::size_t ks[] = {1, 4, 16, 64};
    for (int step = 0; step < 8; ++step) {
      batch_edit b = gen_batch(edges, fi.cfg, ks[step % 4], rng());
      edges = apply_edit(edges, b);
      for (const edge_id& e : b.erase) nf.erase(e.u, e.v);
      for (const weighted_edge& we : b.insert) nf.insert(we.e.u, we.e.v, we.w);
      f.apply(b);
      g.apply(b);
      check_record(f.record());
      if (serialize_record(f.record()) != serialize_record(g.record()))
        return "executors diverge after step " + std::to_string(step);
      if (auto why = query_mismatch(f, nf, rng, 40))
        return "step " + std::to_string(step) + ": " + *why;
    }
    return std::nullopt;
  });

  if (failures == 0) {
    std::cout << "all checks passed\n";
    return 0;
  }
  return 2;
}

// ------------------------------------------------------------------
// bench: CSV rows over an n sweep, a k ladder, and both executors. A k=0
// row is the static build itself; its touched count is the total number of
// (vertex, round) pairs the build processed.

std::vector<std::size_t> k_ladder(std::uint32_t n) {
  std::vector<std::size_t> ks;
  for (std::size_t k = 1; k <= n / 2; k *= 4) ks.push_back(k);
  if (!ks.empty() && ks.back() != n / 2 && n / 2 >= 1) ks.push_back(n / 2);
  return ks;
}

int cmd_bench(const run_config& rc) {
  struct subject {
    std::uint32_t n;
    std::string shape;
    std::uint64_t seed;
    std::vector<weighted_edge> edges;
  };
  std::vector<subject> subjects;
  if (!rc.input.empty()) {
    forest_input fi = load_forest(rc.input);
    subjects.push_back({fi.cfg.n, "file", 1, std::move(fi.edges)});
  } else if (!rc.gen_spec.empty()) {
    gen_spec g = parse_gen(rc.gen_spec);
    subjects.push_back({g.n, g.shape, g.seed, gen_forest(g.shape, g.n, 3, g.seed)});
  } else {
    for (std::uint32_t p = 10; p <= 20; p += 2) {
      std::uint32_t n = 1u << p;
      subjects.push_back({n, "random-ternary", 1, gen_forest("random-ternary", n, 3, 1)});
    }
  }

  std::vector<executor_kind> executors;
  if (rc.executor_chosen)
    executors.push_back(rc.executor == "phased" ? executor_kind::phased
                                                : executor_kind::basic);
  else
    executors = {executor_kind::basic, executor_kind::phased};

  std::cout << "n,k,executor,threads,rounds,touched,wall_ns\n";
  for (const subject& s : subjects) {
    const forest_config cfg{s.n, 3};
    for (executor_kind ex : executors) {
      auto t0 = std::chrono::steady_clock::now();
      auto R = ex == executor_kind::phased
                   ? build_static_phased(s.edges, cfg, standard_algebra{}, rc.threads)
                   : build_static(s.edges, cfg, standard_algebra{}, rc.threads);
      std::uint64_t build_wall = ns_since(t0);
      std::uint64_t build_touched = 0;
      for (std::size_t r = 0; r < R.round_count(); ++r)
        build_touched += R.rounds[r].size();
      std::cout << s.n << ",0," << executor_name(ex) << ',' << rc.threads << ','
                << R.round_count() << ',' << build_touched << ',' << build_wall
                << '\n';

      for (std::size_t k : k_ladder(s.n)) {
        batch_edit b = gen_batch(s.edges, cfg, k, s.seed ^ (0x9e3779b9u * k));
        auto copy = R;
        update_options uo;
        uo.threads = rc.threads;
        uo.debug_invariants = rc.debug;
        update_stats st = ex == executor_kind::phased
                              ? batch_update_phased(copy, b, uo)
                              : batch_update(copy, b, uo);
        std::cout << s.n << ',' << b.size() << ',' << executor_name(ex) << ','
                  << rc.threads << ',' << st.rounds << ',' << st.total_touched
                  << ',' << st.wall_time_ns << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rake-compress trees workbench"};
  app.require_subcommand(1);
  run_config rc;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--input", rc.input, "forest file (first line 'n t', then 'u v [w]')");
    s->add_option("--gen", rc.gen_spec,
                  "generated forest, shape:n:seed with shape one of "
                  "path|star|random-ternary|caterpillar");
    s->add_option("--executor", rc.executor, "update/build scheduling")
        ->check(CLI::IsMember({"basic", "phased"}));
    s->add_option("--threads", rc.threads, "worker count");
    s->add_flag("--debug-invariants", rc.debug, "run the expensive audits");
    s->add_option("--dump", rc.dump_path, "write the final forest to this file");
    s->add_option("--format", rc.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* c_build = app.add_subcommand("build", "contract a forest and report shape");
  add_common(c_build);
  CLI::App* c_update = app.add_subcommand("update", "apply batch files, emit per-batch stats");
  add_common(c_update);
  c_update->add_option("--batch", rc.batches, "batch file ('+ u v [w]' / '- u v')")
      ->required();
  CLI::App* c_query = app.add_subcommand("query", "answer a query file");
  add_common(c_query);
  c_query->add_option("--batch", rc.batches, "batch files applied before querying");
  c_query->add_option("--queries", rc.queries_path,
                      "query file (conn|subtree|psum|pmin|pmax|lca)")
      ->required();
  CLI::App* c_check = app.add_subcommand("check", "run the invariant sweep");
  add_common(c_check);
  CLI::App* c_bench = app.add_subcommand("bench", "timing and touched-work CSV");
  add_common(c_bench);

  CLI11_PARSE(app, argc, argv);
  // bench defaults to both executors unless one was named explicitly
  rc.executor_chosen = c_bench->get_option("--executor")->count() > 0;

  try {
    if (*c_build) return cmd_build(rc);
    if (*c_update) return cmd_update(rc);
    if (*c_query) return cmd_query(rc);
    if (*c_check) return cmd_check(rc);
    if (*c_bench) return cmd_bench(rc);
  } catch (const io_error& e) {
    std::cerr << "io: " << e.what() << '\n';
    return 3;
  } catch (const validation_error& e) {
    std::cerr << "validation: " << e.what() << '\n';
    return 1;
  } catch (const query_error& e) {
    std::cerr << "validation: " << e.what() << '\n';
    return 1;
  } catch (const invariant_error& e) {
    std::cerr << "invariant: " << e.what() << '\n';
    return 2;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
