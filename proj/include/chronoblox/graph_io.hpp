#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chronoblox {

/// Index of a node identifier in the sequence-wide node universe.
using NodeIndex = std::uint32_t;

/// Thrown on malformed input files; message carries the row number when known.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  NodeIndex u = 0;  // u <= v
  NodeIndex v = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One phase snapshot. Node and edge lists are kept sorted; edges are
/// canonical (u <= v) and unique.
struct PhaseGraph {
  int phase_index = 0;
  std::string phase_label;
  std::vector<NodeIndex> nodes;
  std::vector<Edge> edges;

  double total_weight() const;
  bool contains(NodeIndex v) const;
  /// Position of `v` in `nodes`, or -1.
  std::ptrdiff_t position_of(NodeIndex v) const;

  friend bool operator==(const PhaseGraph&, const PhaseGraph&) = default;
};

/// Ordered phases over a shared node universe. Node identifiers are interned
/// once; every phase refers to nodes by NodeIndex.
class GraphSequence {
 public:
  GraphSequence() = default;

  NodeIndex intern(const std::string& id);
  /// Returns false if `id` has never been seen.
  bool lookup(const std::string& id, NodeIndex& out) const;
  const std::string& name(NodeIndex v) const { return node_names_.at(v); }
  std::size_t universe_size() const { return node_names_.size(); }

  std::vector<PhaseGraph>& phases() { return phases_; }
  const std::vector<PhaseGraph>& phases() const { return phases_; }
  std::size_t size() const { return phases_.size(); }
  const PhaseGraph& phase(std::size_t t) const { return phases_.at(t); }

  /// Phase index for a phase label as written in input files, or -1.
  int phase_of_label(const std::string& label) const;

  /// Checks the structural invariants; throws std::invalid_argument.
  void validate() const;

 private:
  std::vector<std::string> node_names_;
  std::unordered_map<std::string, NodeIndex> node_index_;
  std::vector<PhaseGraph> phases_;
};

/// Builder used by parsers and generators: accumulates edges per phase label,
/// merging duplicates by weight summation.
class SequenceBuilder {
 public:
  void add_edge(const std::string& phase, const std::string& src, const std::string& dst,
                double weight);
  void add_node(const std::string& phase, const std::string& node);
  /// Sorts phases (numerically when every label is an integer, otherwise
  /// lexicographically) and reindexes them from 0.
  GraphSequence build(std::size_t min_phases = 2);

 private:
  struct PendingPhase {
    std::set<NodeIndex> nodes;
    std::map<std::pair<NodeIndex, NodeIndex>, double> edges;
  };
  GraphSequence seq_;
  std::map<std::string, PendingPhase> pending_;
};

enum class EdgeFormat { csv, jsonl };

EdgeFormat edge_format_from_name(const std::string& name);

GraphSequence parse_sequence(std::istream& in, EdgeFormat format);

/// Writes `seq` as CSV. Nodes without incident edges are emitted as
/// zero-weight self-loops so that parsing restores them.
void write_sequence_csv(std::ostream& out, const GraphSequence& seq);

using Labels = std::set<std::string>;

struct MetadataTable {
  std::map<std::pair<int, NodeIndex>, Labels> entries;

  const Labels* labels_of(int phase, NodeIndex v) const;
};

struct MetadataParseResult {
  MetadataTable table;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Parses `phase,node,label` rows. The phase column uses the same phase token
/// as the edge file. Unknown (phase, node) references are skipped and counted.
MetadataParseResult parse_metadata(std::istream& in, const GraphSequence& seq);

/// Splits one CSV line. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace chronoblox
