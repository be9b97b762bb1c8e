#include <cmath>

#include <nlohmann/json.hpp>

#include "chronoblox/metagraph.hpp"
#include "chronoblox/synthgen.hpp"
#include "doctest.h"

using namespace chronoblox;

namespace {

const GeneratedSequence& default_run() {
  static const GeneratedSequence gen = generate(default_scenario(3));
  return gen;
}

std::map<std::string, std::set<NodeIndex>> groups_of(const GeneratedSequence& gen, std::size_t t) {
  std::map<std::string, std::set<NodeIndex>> out;
  const auto& phase = gen.sequence.phase(t);
  const auto& part = gen.partitions[t];
  for (std::size_t i = 0; i < phase.nodes.size(); ++i)
    out[part.group_names[part.assignment[i]]].insert(phase.nodes[i]);
  return out;
}

double overlap(const std::set<NodeIndex>& now, const std::set<NodeIndex>& before) {
  std::size_t k = 0;
  for (auto v : now) k += before.count(v);
  return static_cast<double>(k) / static_cast<double>(before.size());
}

Scenario two_group_scenario(int steps, double turnover) {
  Scenario scn;
  scn.label_pool_size = 400;
  scn.seed = 5;
  for (int t = 0; t < steps; ++t) {
    ScenarioStep s;
    s.groups = {{"a", 50}, {"b", 30}};
    s.block_matrix = {{0.3, 0.05}, {0.05, 0.2}};
    if (t > 0) s.turnover = {{"a", turnover}, {"b", turnover}};
    scn.steps.push_back(s);
  }
  return scn;
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("default scenario shape") {
  const auto scn = default_scenario();
  CHECK(scn.steps.size() == 11);
  CHECK(scn.label_pool_size == 11000);
  CHECK_NOTHROW(scn.validate());
  const auto& s0 = scn.steps[0];
  // Core-periphery ordering: core-core > core-periphery > periphery-periphery.
  CHECK(s0.block_matrix[0][0] > s0.block_matrix[0][1]);
  CHECK(s0.block_matrix[0][1] > s0.block_matrix[1][1]);
  const auto& s8 = scn.steps[8];
  const auto cluster = static_cast<std::size_t>(
      std::find_if(s8.groups.begin(), s8.groups.end(), [](const auto& g) { return g.name == "cluster"; }) -
      s8.groups.begin());
  REQUIRE(cluster < s8.groups.size());
  for (std::size_t j = 0; j < s8.groups.size(); ++j)
    if (j != cluster) CHECK(s8.block_matrix[cluster][cluster] > s8.block_matrix[cluster][j]);
  CHECK(scn.steps[6].event == StructuralEvent::add_group);
  CHECK(scn.steps[8].event == StructuralEvent::morph);
}

TEST_CASE("generated phases have the expected sizes and group counts") {
  const auto& gen = default_run();
  REQUIRE(gen.sequence.size() == 11);
  const std::vector<int> counts{2, 2, 2, 2, 2, 2, 3, 3, 4, 4, 4};
  for (std::size_t t = 0; t < 11; ++t) {
    const auto n = gen.sequence.phase(t).nodes.size();
    CHECK(n >= 3000);
    CHECK(n <= 4000);
    CHECK(gen.partitions[t].group_count() == counts[t]);
  }
  CHECK(gen.sequence.universe_size() <= 11000);
}

TEST_CASE("a 75% renewal keeps a quarter of each group") {
  const auto& gen = default_run();
  const auto s6 = groups_of(gen, 6), s7 = groups_of(gen, 7);
  REQUIRE(s6.size() == 3);
  for (const auto& [name, members] : s6) CHECK(std::abs(overlap(s7.at(name), members) - 0.25) <= 0.02);
  const auto s8 = groups_of(gen, 8), s9 = groups_of(gen, 9);
  for (const auto& [name, members] : s8) CHECK(std::abs(overlap(s9.at(name), members) - 0.25) <= 0.02);
}

TEST_CASE("slight turnover keeps the expected share") {
  const auto& gen = default_run();
  // S4 -> S5: sizes unchanged, core turnover 7%, periphery 30%.
  const auto s4 = groups_of(gen, 4), s5 = groups_of(gen, 5);
  CHECK(overlap(s5.at("core"), s4.at("core")) == doctest::Approx(0.93).epsilon(0.01));
  CHECK(overlap(s5.at("periphery"), s4.at("periphery")) == doctest::Approx(0.70).epsilon(0.01));
}

TEST_CASE("realised block densities are within three sigma") {
  const auto& gen = default_run();
  const auto scn = default_scenario(3);
  for (std::size_t t : {0u, 6u, 8u, 10u}) {
    const auto& phase = gen.sequence.phase(t);
    const auto& part = gen.partitions[t];
    const auto& step = scn.steps[t];
    std::map<std::string, int> index;
    for (std::size_t g = 0; g < step.groups.size(); ++g) index[step.groups[g].name] = static_cast<int>(g);
    std::vector<int> group_of(phase.nodes.size());
    std::vector<double> size(step.groups.size(), 0.0);
    for (std::size_t i = 0; i < phase.nodes.size(); ++i) {
      group_of[i] = index.at(part.group_names[part.assignment[i]]);
      size[group_of[i]] += 1.0;
    }
    const std::size_t k = step.groups.size();
    std::vector<std::vector<double>> count(k, std::vector<double>(k, 0.0));
    for (const auto& e : phase.edges) {
      if (e.weight == 0.0) continue;
      int a = group_of[phase.position_of(e.u)], b = group_of[phase.position_of(e.v)];
      if (a > b) std::swap(a, b);
      count[a][b] += 1.0;
    }
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) {
        const double pairs = a == b ? size[a] * (size[a] - 1) / 2 : size[a] * size[b];
        const double p = step.block_matrix[a][b];
        const double sigma = std::sqrt(pairs * p * (1 - p));
        CHECK(std::abs(count[a][b] - pairs * p) <= 3.0 * sigma);
      }
    }
  }
}

TEST_CASE("no turnover keeps membership fixed") {
  const auto gen = generate(two_group_scenario(4, 0.0));
  const auto first = groups_of(gen, 0);
  for (std::size_t t = 1; t < 4; ++t) CHECK(groups_of(gen, t) == first);
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = generate(two_group_scenario(3, 0.2));
  const auto b = generate(two_group_scenario(3, 0.2));
  CHECK(a.sequence.phases() == b.sequence.phases());
  CHECK(a.partitions == b.partitions);
  auto other = two_group_scenario(3, 0.2);
  other.seed = 6;
  CHECK(generate(other).sequence.phases() != a.sequence.phases());
}

TEST_CASE("pool exhaustion and invalid scenarios are errors") {
  auto scn = two_group_scenario(3, 1.0);
  scn.label_pool_size = 100;
  CHECK_THROWS_AS(generate(scn), std::runtime_error);

  auto bad = two_group_scenario(2, 0.1);
  bad.steps[0].block_matrix[0][1] = 0.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = two_group_scenario(2, 0.1);
  bad.steps[1].turnover["a"] = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = two_group_scenario(2, 0.1);
  bad.steps[1].turnover["nope"] = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("scenario json round trip") {
  const auto scn = default_scenario(9);
  const auto back = scenario_from_json(scenario_to_json(scn));
  CHECK(scenario_to_json(back) == scenario_to_json(scn));
  CHECK(back.steps.size() == 11);
  CHECK(back.seed == 9);
}

TEST_CASE("down-scaled scenario keeps the turnover fractions") {
  ScenarioParams params;
  params.scale = 0.15;
  const auto gen = generate(default_scenario(4, params));
  const auto s6 = groups_of(gen, 6), s7 = groups_of(gen, 7);
  for (const auto& [name, members] : s6) CHECK(std::abs(overlap(s7.at(name), members) - 0.25) <= 0.02);
  CHECK(gen.sequence.phase(0).nodes.size() == 480);
}

}  // TEST_SUITE
