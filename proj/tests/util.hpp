#pragma once

#include <random>
#include <vector>

#include "oracle.hpp"
#include "rctree/core.hpp"
#include "rctree/generators.hpp"

// Shared test plumbing: corpus construction and bridging into the oracle's
// own types (the oracle deliberately shares nothing with the library).

namespace testutil {

// random tree with ~1/8 of its edges removed, so components and isolated
// vertices show up in every corpus
inline std::vector<rctree::weighted_edge> random_forest(std::uint32_t n, std::uint32_t t,
                                                        std::uint64_t seed) {
  auto es = rctree::gen_random_ternary(n, t, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::size_t drop = es.size() / 8;
  for (std::size_t i = 0; i < drop && !es.empty(); ++i) {
    std::size_t j = rng() % es.size();
    es[j] = es.back();
    es.pop_back();
  }
  std::sort(es.begin(), es.end(),
            [](const rctree::weighted_edge& a, const rctree::weighted_edge& b) {
              return a.e < b.e;
            });
  return es;
}

inline oracle::naive_forest to_oracle(std::uint32_t n,
                                      const std::vector<rctree::weighted_edge>& es) {
  oracle::naive_forest f(n);
  for (const auto& we : es) f.insert(we.e.u, we.e.v, we.w);
  return f;
}

inline void apply_to_oracle(oracle::naive_forest& f, const rctree::batch_edit& b) {
  for (const auto& e : b.erase) f.erase(e.u, e.v);
  for (const auto& we : b.insert) f.insert(we.e.u, we.e.v, we.w);
}

}  // namespace testutil
