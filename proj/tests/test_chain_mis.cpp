#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "oracle.hpp"
#include "rctree/chain_mis.hpp"

using namespace rctree;

namespace {

// Build a chain_graph from explicit runs of ids; each run is one path.
// `scramble` feeds the members in shuffled order to exercise the sorting
// path in make_chain_graph.
chain_graph graph_from_runs(const std::vector<std::vector<vertex_id>>& runs,
                            std::mt19937_64* scramble = nullptr) {
  std::vector<vertex_id> members;
  std::vector<std::array<vertex_id, 2>> nbrs;
  for (const auto& run : runs)
    for (std::size_t i = 0; i < run.size(); ++i) {
      members.push_back(run[i]);
      nbrs.push_back({i > 0 ? run[i - 1] : nil_vertex,
                      i + 1 < run.size() ? run[i + 1] : nil_vertex});
    }
  if (scramble)
    for (std::size_t i = members.size(); i > 1; --i) {
      std::size_t j = (*scramble)() % i;
      std::swap(members[i - 1], members[j]);
      std::swap(nbrs[i - 1], nbrs[j]);
    }
  return make_chain_graph(std::move(members), std::move(nbrs));
}

std::set<std::pair<vertex_id, vertex_id>> edges_of_runs(
    const std::vector<std::vector<vertex_id>>& runs) {
  std::set<std::pair<vertex_id, vertex_id>> es;
  for (const auto& run : runs)
    for (std::size_t i = 0; i + 1 < run.size(); ++i)
      es.insert(std::minmax(run[i], run[i + 1]));
  return es;
}

}  // namespace

TEST_CASE("empty graph yields an empty set") {
  chain_graph g = graph_from_runs({});
  CHECK(chain_mis(g).empty());
  CHECK(color_chains(g).palette == 0);
}

TEST_CASE("single member is always selected") {
  chain_graph g = graph_from_runs({{42}});
  coloring col = color_chains(g);
  CHECK(col.palette <= 6);
  CHECK(chain_mis(g) == std::vector<vertex_id>{42});
}

TEST_CASE("two-member chain: exactly one side wins, deterministically") {
  chain_graph g = graph_from_runs({{5, 9}});
  coloring col = color_chains(g);
  REQUIRE(col.colors.size() == 2);
  CHECK(col.colors[0] != col.colors[1]);
  auto mis = chain_mis(g);
  REQUIRE(mis.size() == 1);
  CHECK(mis == chain_mis(g));  // repeated calls agree
  // lower color goes first in the sweep, so it is the one selected
  vertex_id expect = col.colors[0] < col.colors[1] ? g.members[0] : g.members[1];
  CHECK(mis[0] == expect);
}

TEST_CASE("sweep admits color classes in ascending order") {
  // path 1-2-3 colored (0,1,0): both endpoints enter, the middle is blocked
  chain_graph g = graph_from_runs({{1, 2, 3}});
  coloring col;
  col.colors = {0, 1, 0};
  col.palette = 2;
  CHECK(mis_from_coloring(g, col) == std::vector<vertex_id>{1, 3});
}

TEST_CASE("consecutive-id path colors properly with a small palette") {
  std::vector<vertex_id> run(64);
  std::iota(run.begin(), run.end(), 0);
  chain_graph g = graph_from_runs({run});
  coloring col = color_chains(g);
  CHECK(col.palette <= 6);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int s = 0; s < 2; ++s)
      if (g.nbr[2 * i + s] != chain_graph::npos)
        CHECK(col.colors[i] != col.colors[g.nbr[2 * i + s]]);
  auto mis = chain_mis(g);
  CHECK(3 * mis.size() >= g.size());
}

TEST_CASE("thousand-member path meets the density floor") {
  std::vector<vertex_id> run(1000);
  std::iota(run.begin(), run.end(), 0);
  chain_graph g = graph_from_runs({run});
  auto mis = chain_mis(g);
  CHECK(mis.size() >= 334);  // ceil(1000/3)
  const auto es = edges_of_runs({run});
  auto adjacent = [&](vertex_id a, vertex_id b) { return es.count(std::minmax(a, b)) != 0; };
  CHECK(oracle::oracle_mis_check(run, mis, adjacent));
}

TEST_CASE("random chain collections: oracle agreement and schedule independence") {
  std::mt19937_64 rng(20260816);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<vertex_id> pool;
    std::size_t want = 1 + rng() % 120;
    while (pool.size() < want) pool.insert(vertex_id(rng() % 1'000'000'000));
    std::vector<vertex_id> ids(pool.begin(), pool.end());
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng() % i]);

    std::vector<std::vector<vertex_id>> runs;
    for (std::size_t at = 0; at < ids.size();) {
      std::size_t len = std::min<std::size_t>(1 + rng() % 40, ids.size() - at);
      runs.emplace_back(ids.begin() + at, ids.begin() + at + len);
      at += len;
    }
    chain_graph g = graph_from_runs(runs, &rng);

    auto mis = chain_mis(g, 1);
    const auto es = edges_of_runs(runs);
    auto adjacent = [&](vertex_id a, vertex_id b) { return es.count(std::minmax(a, b)) != 0; };
    std::vector<vertex_id> members(g.members);
    REQUIRE(oracle::oracle_mis_check(members, mis, adjacent));
    CHECK(3 * mis.size() >= g.size());
    CHECK(chain_mis(g, 2) == mis);
    CHECK(chain_mis(g, 8) == mis);
    coloring col = color_chains(g);
    CHECK(col.palette <= 6);
  }
}

TEST_CASE("malformed inputs are rejected") {
  SECTION("neighbor outside the member set") {
    CHECK_THROWS_AS(make_chain_graph({1, 2}, {{{2, nil_vertex}}, {{1, 7}}}),
                    query_error);
  }
  SECTION("cycles cannot be oriented") {
    std::vector<vertex_id> members{1, 2, 3};
    std::vector<std::array<vertex_id, 2>> nbrs{{2, 3}, {1, 3}, {1, 2}};
    chain_graph g = make_chain_graph(std::move(members), std::move(nbrs));
    CHECK_THROWS_AS(color_chains(g), query_error);
  }
}
