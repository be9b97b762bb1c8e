#include <sstream>

#include "chronoblox/lineage.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chronoblox;

namespace {

std::vector<InterTemporalLink> random_links(Rng& rng, int phases, int groups) {
  std::vector<InterTemporalLink> links;
  for (int t = 0; t + 1 < phases; ++t)
    for (int a = 0; a < groups; ++a)
      for (int b = 0; b < groups; ++b)
        if (rng.uniform() < 0.4) {
          // Coarse weights make equal shares, and so the inclusive boundary, common.
          links.push_back({{t, a}, {t + 1, b}, (1.0 + static_cast<double>(rng.below(4))) / 4.0});
        }
  return links;
}

}  // namespace

TEST_SUITE("lineage") {

TEST_CASE("identical consecutive partitions give one full-weight link per group") {
  MetaGraphSequence seq;
  for (int t = 0; t < 2; ++t) {
    MetaGraph m;
    m.phase_index = t;
    m.members = {{1, 2}, {3, 4, 5}};
    seq.metas.push_back(m);
  }
  const auto links = adjacent_links(build_similarity(seq));
  REQUIRE(links.size() == 2);
  CHECK(links[0] == InterTemporalLink{{0, 0}, {1, 0}, 1.0});
  CHECK(links[1] == InterTemporalLink{{0, 1}, {1, 1}, 1.0});
}

TEST_CASE("only consecutive phases are linked") {
  MetaGraphSequence seq;
  for (const std::vector<NodeIndex>& members : {std::vector<NodeIndex>{1, 2}, {3}, {2, 9}}) {
    MetaGraph m;
    m.phase_index = static_cast<int>(seq.metas.size());
    m.members = {members};
    seq.metas.push_back(m);
  }
  const auto m = build_similarity(seq);
  CHECK(m.entries().size() == 1);
  CHECK(adjacent_links(m).empty());
}

TEST_CASE("adjacent links equal the brute-force scan") {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const auto seq = oracle::random_metas(3, 20, 4, rng);
    std::vector<InterTemporalLink> want;
    for (const auto& [key, s] : oracle::all_pairs_similarity(seq))
      if (key.second.phase == key.first.phase + 1) want.push_back({key.first, key.second, s});
    CHECK(adjacent_links(build_similarity(seq)) == want);
  }
}

TEST_CASE("hhi examples") {
  // A single link on both sides is kept.
  CHECK(hhi_keep_mask({{{0, 0}, {1, 0}, 0.3}}) == std::vector<bool>{true});

  // Parent shares (0.9, 0.1): HHI 0.82, the small link fails on the parent side.
  const std::vector<InterTemporalLink> split{{{0, 0}, {1, 0}, 0.9}, {{0, 0}, {1, 1}, 0.1}};
  CHECK(hhi_keep_mask(split) == std::vector<bool>{true, false});
  CHECK(hhi_filter(split) == std::vector<InterTemporalLink>{split[0]});

  // k equal links on both sides sit on the inclusive boundary.
  for (int k = 2; k <= 7; ++k) {
    std::vector<InterTemporalLink> full;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) full.push_back({{0, a}, {1, b}, 0.1});
    const auto keep = hhi_keep_mask(full);
    CHECK(std::all_of(keep.begin(), keep.end(), [](bool x) { return x; }));
  }

  // The child side can veto a link the parent keeps.
  const std::vector<InterTemporalLink> veto{{{0, 0}, {1, 0}, 0.2}, {{0, 1}, {1, 0}, 0.8}};
  CHECK(hhi_keep_mask(veto) == std::vector<bool>{false, true});
  CHECK_THROWS(hhi_keep_mask({{{0, 0}, {1, 0}, 0.0}}));
}

TEST_CASE("hhi filter and lineages match the oracles") {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const int phases = 2 + static_cast<int>(rng.below(5));
    const int groups = 1 + static_cast<int>(rng.below(5));
    const auto links = random_links(rng, phases, groups);
    const auto keep = hhi_keep_mask(links);
    CHECK(keep == oracle::hhi_keep(links));

    std::vector<GroupId> all;
    for (int t = 0; t < phases; ++t)
      for (int g = 0; g < groups; ++g) all.push_back({t, g});
    const auto filtered = hhi_filter(links);
    const auto graph = lineages(filtered, all);
    CHECK(graph.lineage_of == oracle::components(filtered, all));
    CHECK(graph.links == filtered);
  }
}

TEST_CASE("lineage examples") {
  const std::vector<GroupId> all{{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}};
  const auto none = lineages({}, all);
  CHECK(none.lineage_count() == 5);

  const auto chain = lineages({{{0, 0}, {1, 0}, 1.0}, {{1, 0}, {2, 0}, 1.0}}, all);
  CHECK(chain.lineage_of.at({0, 0}) == chain.lineage_of.at({2, 0}));
  CHECK(chain.lineage_count() == 3);

  const auto two = lineages({{{0, 0}, {1, 0}, 1.0}, {{0, 1}, {1, 1}, 1.0}}, all);
  CHECK(two.lineage_count() == 3);
  CHECK(two.lineage_of.at({0, 0}) == 0);
  CHECK(two.lineage_of.at({0, 1}) == 1);
  CHECK(two.lineage_of.at({2, 0}) == 2);

  CHECK_THROWS(lineages({{{0, 0}, {5, 5}, 1.0}}, all));
}

TEST_CASE("links dump") {
  std::ostringstream out;
  write_links_csv(out, {{{0, 0}, {1, 2}, 0.5}}, {true});
  CHECK(out.str() == "parent_phase,parent_group,child_phase,child_group,weight,kept\n0,0,1,2,0.5,true\n");
}

}  // TEST_SUITE
