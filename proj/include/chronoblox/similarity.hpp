#pragma once

#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "chronoblox/metagraph.hpp"

namespace chronoblox {

/// Jaccard index of two sorted, duplicate-free sets. Throws
/// std::invalid_argument when both are empty.
double jaccard(std::span<const NodeIndex> a, std::span<const NodeIndex> b);

struct SimilarityEntry {
  int a = 0;  // global group index, a < b
  int b = 0;
  double value = 0.0;

  friend bool operator==(const SimilarityEntry&, const SimilarityEntry&) = default;
};

/// Sparse symmetric similarity over every group of every phase. Only the
/// upper triangle is stored; zeros and the diagonal are never stored.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<GroupId> order, std::vector<SimilarityEntry> entries);

  const std::vector<GroupId>& order() const { return order_; }
  const std::vector<SimilarityEntry>& entries() const { return entries_; }
  std::size_t size() const { return order_.size(); }

  /// Global index of `g`, or -1.
  int index_of(const GroupId& g) const;
  double value(const GroupId& a, const GroupId& b) const;

  /// Symmetric neighbour lists (global index, similarity), sorted by index.
  std::vector<std::vector<std::pair<int, double>>> adjacency() const;

 private:
  std::vector<GroupId> order_;
  std::vector<SimilarityEntry> entries_;
};

/// Builds the matrix through a node -> groups inverted index, so only
/// overlapping pairs are visited.
SimilarityMatrix build_similarity(const MetaGraphSequence& seq);

/// `phase_a,group_a,phase_b,group_b,jaccard`
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& m);

}  // namespace chronoblox
