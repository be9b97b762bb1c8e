#include <sstream>

#include "chronoblox/similarity.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chronoblox;

namespace {

std::map<std::pair<GroupId, GroupId>, double> entries_of(const SimilarityMatrix& m) {
  std::map<std::pair<GroupId, GroupId>, double> out;
  for (const auto& e : m.entries()) {
    GroupId a = m.order()[e.a], b = m.order()[e.b];
    if (b < a) std::swap(a, b);
    out[{a, b}] = e.value;
  }
  return out;
}

MetaGraphSequence single_groups(const std::vector<std::vector<NodeIndex>>& per_phase) {
  MetaGraphSequence seq;
  for (std::size_t t = 0; t < per_phase.size(); ++t) {
    MetaGraph m;
    m.phase_index = static_cast<int>(t);
    m.members.push_back(per_phase[t]);
    seq.metas.push_back(m);
  }
  return seq;
}

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("jaccard examples") {
  const std::vector<NodeIndex> a{1, 2, 3}, b{2, 3, 4}, c{7, 8}, empty;
  CHECK(jaccard(a, b) == 0.5);
  CHECK(jaccard(a, a) == 1.0);
  CHECK(jaccard(a, c) == 0.0);
  CHECK(jaccard(a, empty) == 0.0);
  CHECK_THROWS_AS(jaccard(empty, empty), std::invalid_argument);
}

TEST_CASE("jaccard matches the set oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<NodeIndex> a, b;
    for (NodeIndex v = 0; v < 30; ++v) {
      if (rng.uniform() < 0.3) a.push_back(v);
      if (rng.uniform() < 0.3) b.push_back(v);
    }
    if (a.empty() && b.empty()) continue;
    CHECK(jaccard(a, b) == oracle::jaccard(a, b));
  }
}

TEST_CASE("identical single-group phases give one entry of 1") {
  const auto m = build_similarity(single_groups({{1, 2, 3}, {1, 2, 3}}));
  REQUIRE(m.entries().size() == 1);
  CHECK(m.entries()[0].value == 1.0);
  CHECK(m.value({0, 0}, {1, 0}) == 1.0);
  CHECK(m.value({1, 0}, {0, 0}) == 1.0);
  CHECK(m.value({0, 0}, {0, 0}) == 0.0);
}

TEST_CASE("sparse build matches the all-pairs scan") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = oracle::random_metas(1 + static_cast<int>(rng.below(6)), 25, 5, rng);
    const auto m = build_similarity(seq);
    CHECK(entries_of(m) == oracle::all_pairs_similarity(seq));
    CHECK(m.size() == seq.total_groups());
    for (const auto& e : m.entries()) {
      CHECK(e.a < e.b);
      CHECK(m.order()[e.a].phase != m.order()[e.b].phase);
    }
  }
}

TEST_CASE("adjacency is symmetric") {
  Rng rng(9);
  const auto m = build_similarity(oracle::random_metas(4, 20, 3, rng));
  const auto adj = m.adjacency();
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (const auto& [j, w] : adj[i]) {
      const auto& back = adj[j];
      const auto it = std::find_if(back.begin(), back.end(), [&](const auto& p) { return p.first == static_cast<int>(i); });
      REQUIRE(it != back.end());
      CHECK(it->second == w);
    }
  }
}

TEST_CASE("constructor rejects invalid entries") {
  const std::vector<GroupId> order{{0, 0}, {1, 0}};
  CHECK_THROWS(SimilarityMatrix(order, {{0, 0, 0.5}}));
  CHECK_THROWS(SimilarityMatrix(order, {{0, 1, 0.0}}));
  CHECK_THROWS(SimilarityMatrix(order, {{0, 1, 1.5}}));
  CHECK_THROWS(SimilarityMatrix(order, {{0, 2, 0.5}}));
}

TEST_CASE("csv dump lists every entry") {
  const auto m = build_similarity(single_groups({{1, 2}, {2, 3}, {3}}));
  std::ostringstream out;
  write_similarity_csv(out, m);
  const std::string text = out.str();
  CHECK(text.rfind("phase_a,group_a,phase_b,group_b,jaccard\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + static_cast<long>(m.entries().size()));
}

}  // TEST_SUITE
