#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <vector>

#include "oracle.hpp"
#include "rctree/forest.hpp"
#include "rctree/io.hpp"
#include "rctree/serialize.hpp"
#include "rctree/validate.hpp"
#include "util.hpp"

using namespace rctree;

namespace {

weight_t hashed_vertex_value(vertex_id v) { return (v * 2654435761u) % 997; }

standard_algebra full_algebra() {
  standard_algebra a;
  a.mode = path_vertex_mode::all;
  a.vertex_fn = &hashed_vertex_value;
  return a;
}

using forest = rc_forest<standard_algebra>;

validation_error::kind rejects(const forest& f, const batch_edit& b) {
  try {
    f.validate_batch(b);
  } catch (const validation_error& e) {
    return e.what_kind;
  }
  FAIL("batch was admitted");
  return validation_error::kind::cycle;  // unreachable
}

}  // namespace

TEST_CASE("a fresh forest is isolated root clusters") {
  forest f({5, 3}, full_algebra());
  CHECK(f.vertex_count() == 5);
  CHECK(f.edge_count() == 0);
  CHECK(f.record().round_count() == 1);
  for (vertex_id v = 0; v < 5; ++v) {
    CHECK(f.degree(v) == 0);
    CHECK(f.connected(v, v));
    for (vertex_id u = 0; u < v; ++u) CHECK_FALSE(f.connected(u, v));
  }
  check_record(f.record());
}

TEST_CASE("the zero-vertex forest exists but answers nothing") {
  forest f({0, 3}, full_algebra());
  CHECK(f.vertex_count() == 0);
  CHECK(f.edge_count() == 0);
  CHECK_THROWS_AS(f.connected(0, 0), query_error);
  CHECK_THROWS_AS(f.degree(0), query_error);
  CHECK_THROWS_AS(f.path_sum(0, 0), query_error);

  // an empty batch is still legal; anything naming a vertex is not
  CHECK(f.apply(batch_edit{}).k == 0);
  batch_edit one;
  one.insert.push_back({edge_id(0, 1), 1});
  CHECK_THROWS_AS(f.validate_batch(one), query_error);
}

TEST_CASE("validation admits exactly the edits that keep a legal forest") {
  // path 0-1-2 plus spare vertices, t = 3
  std::vector<weighted_edge> es{{edge_id(0, 1), 5}, {edge_id(1, 2), 7}};
  forest f({6, 3}, es, full_algebra());
  using kind = validation_error::kind;

  SECTION("good batches come back as apply-ready tokens") {
    batch_edit b;
    b.insert.push_back({edge_id(2, 3), 2});
    auto ve = f.validate_batch(b);
    CHECK(ve.edit().insert.size() == 1);
    f.apply(ve);
    CHECK(f.has_edge(edge_id(2, 3)));
    CHECK(f.path_sum(0, 3) == 5 + 7 + 2 + hashed_vertex_value(0) + hashed_vertex_value(1) +
                                  hashed_vertex_value(2) + hashed_vertex_value(3));
  }

  SECTION("each failure kind names its offender") {
    batch_edit b;

    b.erase = {edge_id(3, 4)};
    CHECK(rejects(f, b) == kind::missing_edge);

    b.erase = {edge_id(0, 1), edge_id(0, 1)};
    CHECK(rejects(f, b) == kind::duplicate_edge);

    b = {};
    b.insert = {{edge_id(0, 1), 1}};
    CHECK(rejects(f, b) == kind::duplicate_edge);  // already present

    b.insert = {{edge_id(3, 4), 1}, {edge_id(3, 4), 9}};
    CHECK(rejects(f, b) == kind::duplicate_edge);  // repeated insert

    b = {};
    b.erase = {edge_id(0, 1)};
    b.insert = {{edge_id(0, 1), 9}};
    CHECK(rejects(f, b) == kind::duplicate_edge);  // insert and delete collide

    b = {};
    b.insert = {{edge_id(3, 3), 1}};
    CHECK(rejects(f, b) == kind::cycle);  // self-loop

    b.insert = {{edge_id(0, 2), 1}};
    CHECK(rejects(f, b) == kind::cycle);  // closes the triangle

    b.insert = {{edge_id(3, 4), 1}, {edge_id(4, 5), 1}, {edge_id(3, 5), 1}};
    CHECK(rejects(f, b) == kind::cycle);  // cycle purely among inserts

    // vertex 1 already carries two edges; two more break t = 3
    b = {};
    b.insert = {{edge_id(1, 3), 1}, {edge_id(1, 4), 1}};
    CHECK(rejects(f, b) == kind::degree_overflow);

    b.insert = {{edge_id(99, 0), 1}};
    CHECK_THROWS_AS(f.validate_batch(b), query_error);  // out of range
  }

  SECTION("deletions make room within the same batch") {
    batch_edit b;
    b.erase = {edge_id(1, 2)};
    b.insert = {{edge_id(0, 2), 1}};  // fine once 1-2 is gone
    f.apply(b);
    CHECK(f.connected(0, 2));
    CHECK(f.path_hops(1, 2) == 2);

    // and a full swap at the degree bound
    batch_edit c;
    c.erase = {edge_id(0, 1)};
    c.insert = {{edge_id(1, 3), 1}, {edge_id(1, 4), 1}, {edge_id(1, 5), 1}};
    f.apply(c);
    CHECK(f.degree(1) == 3);
  }

  SECTION("one bad element rejects the whole batch") {
    batch_edit b;
    b.insert = {{edge_id(3, 4), 1}};
    b.erase = {edge_id(4, 5)};  // not present
    CHECK(rejects(f, b) == kind::missing_edge);
    CHECK(f.edge_count() == 2);
    CHECK_FALSE(f.has_edge(edge_id(3, 4)));
  }

  SECTION("tokens expire when the forest moves on") {
    batch_edit b;
    b.insert = {{edge_id(3, 4), 1}};
    auto ve = f.validate_batch(b);
    batch_edit other;
    other.insert = {{edge_id(4, 5), 1}};
    f.apply(other);
    CHECK_THROWS_AS(f.apply(ve), error);
  }
}

TEST_CASE("degree follows the surviving rows round by round") {
  std::vector<weighted_edge> es{{edge_id(0, 1), 1}, {edge_id(1, 2), 1}};
  forest f({3, 3}, es, full_algebra());
  CHECK(f.degree(0, 0) == 1);
  CHECK(f.degree(1, 0) == 2);
  CHECK(f.degree(2, 0) == 1);

  // across a corpus: degree matches a hand count of edge/binary slots, dead
  // vertices throw, and unary slots show up somewhere without counting
  bool saw_uncounted_unary = false;
  for (std::uint64_t seed : {3u, 14u, 15u}) {
    auto edges = testutil::random_forest(48, 3, seed);
    forest g({48, 3}, edges, full_algebra());
    const auto& R = g.record();
    for (std::size_t r = 0; r < R.round_count(); ++r) {
      for (vertex_id v = 0; v < 48; ++v) {
        if (!R.alive_at(v, r)) {
          CHECK_THROWS_AS(g.degree(v, r), query_error);
          continue;
        }
        int by_hand = 0;
        bool unary_here = false;
        for (const slot& s : R.rounds[r].row(v)) {
          by_hand += s.counts_degree();
          unary_here = unary_here || s.tag == slot_tag::unary;
        }
        CHECK(g.degree(v, r) == std::uint32_t(by_hand));
        saw_uncounted_unary = saw_uncounted_unary || (unary_here && std::size_t(by_hand) < 3);
      }
    }
    CHECK_THROWS_AS(g.degree(0, std::uint32_t(R.round_count() + 5)), query_error);
  }
  CHECK(saw_uncounted_unary);
}

TEST_CASE("facade sessions answer like the oracle under both executors") {
  const std::uint32_t n = 40;
  auto edges = testutil::random_forest(n, 3, 77);
  forest basic({n, 3}, edges, full_algebra());
  forest phased({n, 3}, edges, full_algebra(),
                {executor_kind::phased, 2, true});
  basic.options().debug_invariants = true;

  auto nf = testutil::to_oracle(n, edges);
  std::mt19937_64 rng(123);
  auto current = edges;
  for (int step = 0; step < 6; ++step) {
    batch_edit b = gen_batch(current, {n, 3}, 5, rng());
    testutil::apply_to_oracle(nf, b);
    current = apply_edit(current, b);
    update_stats sb = basic.apply(b);
    update_stats sp = phased.apply(b);
    CHECK(sb.total_touched == sp.total_touched);
    CHECK(serialize_record(basic.record()) == serialize_record(phased.record()));

    for (int q = 0; q < 25; ++q) {
      vertex_id u = rng() % n, v = rng() % n;
      bool conn = oracle::oracle_connected(nf, u, v);
      CHECK(basic.connected(u, v) == conn);
      if (conn) {
        CHECK(basic.path_sum(u, v) ==
              oracle::oracle_path_sum(nf, u, v, 2, hashed_vertex_value));
        if (u != v) {
          auto [e, w] = basic.path_extreme_edge(u, v, true);
          auto oe = oracle::oracle_path_extreme(nf, u, v, true);
          REQUIRE(oe.has_value());
          CHECK(e.u == oe->first.first);
          CHECK(e.v == oe->first.second);
          CHECK(w == oe->second);
        }
        vertex_id r = rng() % n;
        if (oracle::oracle_connected(nf, r, u))
          CHECK(basic.lca(r, u, v) == oracle::oracle_lca(nf, r, u, v));
      } else {
        CHECK_THROWS_AS(basic.path_sum(u, v), query_error);
      }
    }
  }
  check_record(basic.record());
}

TEST_CASE("forest files round-trip and reject nonsense") {
  SECTION("round trip with weights, comments, defaults") {
    std::istringstream in(
        "# toy forest\n"
        "6 3\n"
        "\n"
        "0 1 5\n"
        "2 1 -4   # negative weights are fine\n"
        "4 5\n");
    forest_input f = parse_forest(in);
    CHECK(f.cfg.n == 6);
    CHECK(f.cfg.t == 3);
    REQUIRE(f.edges.size() == 3);
    CHECK(f.edges[1].e == edge_id(1, 2));
    CHECK(f.edges[1].w == -4);
    CHECK(f.edges[2].w == 1);  // default weight

    std::ostringstream out;
    write_forest(out, f.cfg, f.edges);
    std::istringstream back(out.str());
    forest_input g = parse_forest(back);
    CHECK(g.cfg.n == f.cfg.n);
    REQUIRE(g.edges.size() == f.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      CHECK(g.edges[i].e == f.edges[i].e);
      CHECK(g.edges[i].w == f.edges[i].w);
    }
  }

  SECTION("parse failures carry name and line") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
      std::istringstream in(text);
      try {
        parse_forest(in, "bad.forest");
        FAIL("parsed");
      } catch (const io_error& e) {
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
      }
    };
    fails_with("", "bad.forest:1");
    fails_with("4\n", "header");
    fails_with("4 3\n0 x\n", "bad.forest:2");
    fails_with("4 3\n0 1 2 3\n", "expected edge");
    fails_with("4 0\n", "positive");
    CHECK_THROWS_AS(load_forest("/nonexistent/f.txt"), io_error);
  }
}

TEST_CASE("batch files round-trip") {
  std::istringstream in(
      "+ 0 1 5\n"
      "- 2 3\n"
      "+ 4 5\n"
      "# trailing comment\n");
  batch_edit b = parse_batch(in);
  REQUIRE(b.insert.size() == 2);
  REQUIRE(b.erase.size() == 1);
  CHECK(b.insert[0].w == 5);
  CHECK(b.insert[1].w == 1);
  CHECK(b.erase[0] == edge_id(2, 3));

  std::ostringstream out;
  write_batch(out, b);
  std::istringstream back(out.str());
  batch_edit c = parse_batch(back);
  CHECK(c.erase == b.erase);
  REQUIRE(c.insert.size() == b.insert.size());
  for (std::size_t i = 0; i < c.insert.size(); ++i) {
    CHECK(c.insert[i].e == b.insert[i].e);
    CHECK(c.insert[i].w == b.insert[i].w);
  }

  std::istringstream junk("* 1 2\n");
  CHECK_THROWS_AS(parse_batch(junk), io_error);
  std::istringstream short_line("+ 1\n");
  CHECK_THROWS_AS(parse_batch(short_line), io_error);
  std::istringstream weighted_delete("- 1 2 5\n");
  CHECK_THROWS_AS(parse_batch(weighted_delete), io_error);
}

TEST_CASE("query files drive the runner and pin the answer format") {
  // path 0-1-2 with weights 5, 7; vertex 3 isolated
  std::vector<weighted_edge> es{{edge_id(0, 1), 5}, {edge_id(1, 2), 7}};
  standard_algebra a;  // edges only, keeps the expected strings simple
  forest f({4, 3}, es, a);

  std::istringstream in(
      "conn 0 2\n"
      "conn 0 3\n"
      "psum 0 2\n"
      "subtree 1 0\n"
      "pmin 0 2\n"
      "pmax 0 2\n"
      "lca 0 2 2\n"
      "psum 0 3\n");
  auto qs = parse_queries(in);
  REQUIRE(qs.size() == 8);
  CHECK(qs[6].c == 0);  // lca root rides in front

  auto answers = f.run(qs);
  std::vector<std::string> lines;
  for (const auto& ans : answers) lines.push_back(format_answer(ans));
  std::vector<std::string> expect{
      "true", "false", "12", "5", "0 1 5", "1 2 7", "2", "error: not-connected"};
  CHECK(lines == expect);

  std::istringstream junk("frob 1 2\n");
  CHECK_THROWS_AS(parse_queries(junk), io_error);
  std::istringstream arity("lca 1 2\n");
  CHECK_THROWS_AS(parse_queries(arity), io_error);
}

TEST_CASE("update stats serialize to the documented json shape") {
  update_stats s;
  s.k = 3;
  s.rounds = 2;
  s.per_round_affected = {4, 1};
  s.total_touched = 5;
  s.wall_time_ns = 1234;
  nlohmann::json j = update_stats_json(s);
  CHECK(j.size() == 5);
  CHECK(j["k"] == 3);
  CHECK(j["rounds"] == 2);
  CHECK(j["per_round_affected"] == nlohmann::json({4, 1}));
  CHECK(j["total_touched"] == 5);
  CHECK(j["wall_time_ns"] == 1234);
}
