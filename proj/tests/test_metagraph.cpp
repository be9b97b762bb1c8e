#include <sstream>

#include "chronoblox/metagraph.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chronoblox;

namespace {

GraphSequence parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_sequence(in, EdgeFormat::csv);
}

Partition partition_of(const PhaseGraph& phase, const GraphSequence& seq,
                       const std::map<std::string, int>& group) {
  Partition p;
  p.phase_index = phase.phase_index;
  for (NodeIndex v : phase.nodes) p.assignment.push_back(group.at(seq.name(v)));
  return p;
}

}  // namespace

TEST_SUITE("metagraph") {

TEST_CASE("one group collects every edge on the diagonal") {
  const auto seq = parse_csv("0,a,b\n0,b,c\n0,c,a\n1,a,b\n");
  const auto meta = build_metagraph(seq.phase(0), partition_of(seq.phase(0), seq, {{"a", 0}, {"b", 0}, {"c", 0}}));
  CHECK(meta.group_count() == 1);
  CHECK(meta.edges.size() == 1);
  CHECK(meta.edges.at({0, 0}) == 3.0);
}

TEST_CASE("two pairs with five unit edges") {
  const auto seq = parse_csv("0,a,b\n0,c,d\n0,a,c\n0,b,d\n0,a,d\n1,a,b\n");
  const auto meta = build_metagraph(
      seq.phase(0), partition_of(seq.phase(0), seq, {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}}));
  CHECK(meta.edges.at({0, 0}) == 1.0);
  CHECK(meta.edges.at({1, 1}) == 1.0);
  CHECK(meta.edges.at({0, 1}) == 3.0);
}

TEST_CASE("edgeless singletons give no meta edges") {
  const auto seq = parse_csv("0,a,a,0\n0,b,b,0\n0,c,c,0\n1,a,b\n");
  const auto meta = build_metagraph(seq.phase(0), partition_of(seq.phase(0), seq, {{"a", 0}, {"b", 1}, {"c", 2}}));
  CHECK(meta.group_count() == 3);
  CHECK(meta.edges.empty());
}

TEST_CASE("random instances match the edge-scan oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = oracle::random_graph(12, 0.3, rng, true);
    const auto seq = oracle::to_sequence(g);
    const auto& phase = seq.phase(0);
    const int k = 1 + static_cast<int>(rng.below(5));
    // Dense labels: the first k nodes seed the groups.
    Partition part;
    std::map<NodeIndex, int> group;
    for (std::size_t i = 0; i < phase.nodes.size(); ++i) {
      const int l = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : static_cast<int>(rng.below(k));
      part.assignment.push_back(l);
      group[phase.nodes[i]] = l;
    }
    const auto meta = build_metagraph(phase, part);
    CHECK(meta.edges == oracle::metagraph_edges(phase, group));
    std::size_t members = 0;
    for (const auto& m : meta.members) {
      CHECK(std::is_sorted(m.begin(), m.end()));
      members += m.size();
    }
    CHECK(members == phase.nodes.size());
  }
}

TEST_CASE("partition mismatch is rejected") {
  const auto seq = parse_csv("0,a,b\n1,a,b\n");
  Partition p;
  p.phase_index = 0;
  p.assignment = {0};
  CHECK_THROWS_AS(build_metagraph(seq.phase(0), p), std::invalid_argument);
}

TEST_CASE("dominant label uses majority, lexicographic ties and the empty sentinel") {
  const auto seq = parse_csv("0,a,b\n0,c,d\n0,e,f\n1,a,b\n");
  const auto part = partition_of(seq.phase(0), seq,
                                 {{"a", 0}, {"b", 0}, {"c", 0}, {"d", 1}, {"e", 1}, {"f", 2}});
  std::istringstream in("0,a,UK\n0,b,UK\n0,c,US\n0,d,US\n0,e,UK\n");
  const auto table = parse_metadata(in, seq).table;
  const auto labels = dominant_label(build_metagraph(seq.phase(0), part), table);
  CHECK(labels.at({0, 0}) == "UK");
  CHECK(labels.at({0, 1}) == "UK");
  CHECK(labels.at({0, 2}) == kNoLabel);
  CHECK(kNoLabel == "∅");
}

}  // TEST_SUITE
