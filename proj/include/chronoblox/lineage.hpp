#pragma once

#include <map>
#include <ostream>
#include <vector>

#include "chronoblox/similarity.hpp"

namespace chronoblox {

/// Similarity link from a group of phase t to a group of phase t + 1.
struct InterTemporalLink {
  GroupId parent;
  GroupId child;
  double weight = 0.0;

  friend bool operator==(const InterTemporalLink&, const InterTemporalLink&) = default;
};

using LineageId = int;

struct LineageGraph {
  std::vector<InterTemporalLink> links;
  /// Dense ids, numbered in order of each lineage's smallest member.
  std::map<GroupId, LineageId> lineage_of;

  int lineage_count() const;
};

/// Every positive-similarity pair between consecutive phases, sorted by
/// (parent, child).
std::vector<InterTemporalLink> adjacent_links(const SimilarityMatrix& m);

/// Symmetric Herfindahl-Hirschman filter. A link survives iff its weight
/// share is at least the HHI of its parent's outgoing links and at least the
/// HHI of its child's incoming links. Shares are computed once on the input.
std::vector<InterTemporalLink> hhi_filter(const std::vector<InterTemporalLink>& links);

/// Keep flag per input link, in input order.
std::vector<bool> hhi_keep_mask(const std::vector<InterTemporalLink>& links);

/// Connected components of the filtered link graph over `all_groups`.
LineageGraph lineages(const std::vector<InterTemporalLink>& filtered,
                      const std::vector<GroupId>& all_groups);

/// `parent_phase,parent_group,child_phase,child_group,weight,kept`
void write_links_csv(std::ostream& out, const std::vector<InterTemporalLink>& links,
                     const std::vector<bool>& kept);

}  // namespace chronoblox
