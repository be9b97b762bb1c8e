#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chronoblox/graph_io.hpp"
#include "chronoblox/grouping.hpp"

namespace chronoblox {

/// A node group identified by (phase, local id). Ordering is lexicographic.
struct GroupId {
  int phase = 0;
  int local = 0;

  friend auto operator<=>(const GroupId&, const GroupId&) = default;
  friend bool operator==(const GroupId&, const GroupId&) = default;
};

std::string to_string(const GroupId& g);

/// Meta-graph of one phase. `members[b]` is the sorted member set of local
/// group b; `edges` maps (a, b) with a <= b to the summed edge weight, with
/// within-group weight on the diagonal.
struct MetaGraph {
  int phase_index = 0;
  std::vector<std::vector<NodeIndex>> members;
  std::map<std::pair<int, int>, double> edges;
  /// Optional group tokens carried over from an imported partition.
  std::vector<std::string> group_names;

  int group_count() const { return static_cast<int>(members.size()); }
  GroupId group(int local) const { return {phase_index, local}; }
};

inline const std::string kNoLabel = "\xE2\x88\x85";  // U+2205 EMPTY SET

struct MetaGraphSequence {
  std::vector<MetaGraph> metas;
  /// Dominant label per group; empty when no metadata was supplied.
  std::map<GroupId, std::string> layer_summary;

  std::size_t total_groups() const;
  const std::vector<NodeIndex>& members(const GroupId& g) const {
    return metas.at(g.phase).members.at(g.local);
  }
};

MetaGraph build_metagraph(const PhaseGraph& phase, const Partition& part);

/// Most frequent label among members; ties go to the lexicographically
/// smallest label; unlabeled groups get kNoLabel.
std::map<GroupId, std::string> dominant_label(const MetaGraph& meta, const MetadataTable& table);

MetaGraphSequence build_metagraph_sequence(const GraphSequence& seq,
                                           const std::vector<Partition>& parts,
                                           const MetadataTable* table = nullptr);

}  // namespace chronoblox
