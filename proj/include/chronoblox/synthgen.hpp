#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chronoblox/graph_io.hpp"
#include "chronoblox/grouping.hpp"

namespace chronoblox {

struct GroupSpec {
  std::string name;
  int target_size = 1;
};

/// Moves round(fraction * |from|) random members of `from` into `to`.
struct MemberMove {
  std::string from;
  std::string to;
  double fraction = 0.0;
};

enum class StructuralEvent { none, add_group, morph };

/// One phase of a scenario. Membership evolves from the previous step in
/// this order: moves, turnover (members replaced by fresh pool labels), then
/// resizing to `target_size` (random members leave or fresh labels enter).
struct ScenarioStep {
  std::vector<GroupSpec> groups;
  std::vector<std::vector<double>> block_matrix;
  std::map<std::string, double> turnover;
  std::vector<MemberMove> moves;
  StructuralEvent event = StructuralEvent::none;
};

struct Scenario {
  std::vector<ScenarioStep> steps;
  int label_pool_size = 11000;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range probabilities, fractions or
  /// sizes, asymmetric block matrices, or unknown group names.
  void validate() const;
};

/// Scenario knobs whose values the reference scenario only describes
/// qualitatively.
struct ScenarioParams {
  double slight_turnover = 0.07;
  double higher_turnover = 0.30;
  double renewal = 0.75;
  double periphery_to_core = 0.02;
  /// Multiplies every group size and the label pool.
  double scale = 1.0;
  /// Block probabilities are multiplied by 1/scale so expected degrees stay
  /// comparable when scaled down.
  bool keep_degrees = true;
};

/// Eleven steps: core/periphery with slight changes, a periphery shake-up, a
/// second periphery, a 75% renewal, an emerging cluster, another 75%
/// renewal, and a final slight change.
Scenario default_scenario(std::uint64_t seed = 0, const ScenarioParams& params = {});

struct GeneratedSequence {
  GraphSequence sequence;
  /// Ground truth, group tokens are the scenario group names.
  std::vector<Partition> partitions;
};

/// Samples every step. Fresh labels come from never-used pool labels first,
/// then from labels absent from both the previous and the current phase;
/// throws std::runtime_error when neither is available.
GeneratedSequence generate(const Scenario& scn);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scn);

}  // namespace chronoblox
