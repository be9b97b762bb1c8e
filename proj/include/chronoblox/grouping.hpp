#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "chronoblox/graph_io.hpp"

namespace chronoblox {

/// Per-phase node grouping. `assignment[i]` is the dense group id of
/// `phase.nodes[i]`.
struct Partition {
  int phase_index = 0;
  std::vector<int> assignment;
  /// Original group tokens for imported partitions (index = dense id); empty
  /// for Louvain output.
  std::vector<std::string> group_names;

  int group_count() const;
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Newman-Girvan modularity (resolution 1). Self-loops contribute their
/// weight once to the internal sum and twice to the node degree. An edgeless
/// graph has modularity 0.
double modularity(const PhaseGraph& phase, const std::vector<int>& assignment);

/// Multi-level Louvain. `seed` drives the node visiting order. Gain ties go
/// to the smallest target group id; a level stops once a full pass improves
/// modularity by no more than 1e-9. The result is refined by single-node
/// moves on the original graph, so it is locally maximal under such moves.
Partition louvain(const PhaseGraph& phase, std::uint64_t seed);

/// Reads `phase,node,group` rows. Group tokens are densified per phase in
/// order of first appearance.
std::vector<Partition> import_partition(std::istream& in, const GraphSequence& seq);

void write_partition_csv(std::ostream& out, const GraphSequence& seq,
                         const std::vector<Partition>& partitions);

}  // namespace chronoblox
