#include "chronoblox/metagraph.hpp"

#include <stdexcept>

namespace chronoblox {

std::string to_string(const GroupId& g) {
  return std::to_string(g.phase) + ":" + std::to_string(g.local);
}

std::size_t MetaGraphSequence::total_groups() const {
  std::size_t n = 0;
  for (const auto& m : metas) n += m.members.size();
  return n;
}

MetaGraph build_metagraph(const PhaseGraph& phase, const Partition& part) {
  if (part.phase_index != phase.phase_index || part.assignment.size() != phase.nodes.size())
    throw std::invalid_argument("partition does not match phase " + phase.phase_label);

  MetaGraph meta;
  meta.phase_index = phase.phase_index;
  meta.group_names = part.group_names;
  const int k = part.group_count();
  meta.members.resize(k);
  for (std::size_t i = 0; i < phase.nodes.size(); ++i) {
    const int g = part.assignment[i];
    if (g < 0) throw std::invalid_argument("negative group id");
    meta.members[g].push_back(phase.nodes[i]);  // phase.nodes is sorted
  }
  for (int g = 0; g < k; ++g) {
    if (meta.members[g].empty())
      throw std::invalid_argument("group ids are not dense in phase " + phase.phase_label);
  }

  for (const auto& e : phase.edges) {
    int a = part.assignment[phase.position_of(e.u)];
    int b = part.assignment[phase.position_of(e.v)];
    if (a > b) std::swap(a, b);
    meta.edges[{a, b}] += e.weight;
  }
  return meta;
}

std::map<GroupId, std::string> dominant_label(const MetaGraph& meta, const MetadataTable& table) {
  std::map<GroupId, std::string> out;
  for (int b = 0; b < meta.group_count(); ++b) {
    std::map<std::string, int> counts;
    for (NodeIndex v : meta.members[b]) {
      if (const auto* labels = table.labels_of(meta.phase_index, v)) {
        for (const auto& l : *labels) ++counts[l];
      }
    }
    std::string best = kNoLabel;
    int best_count = 0;
    // map iteration is lexicographic, so strict > keeps the smallest on ties
    for (const auto& [label, c] : counts) {
      if (c > best_count) {
        best = label;
        best_count = c;
      }
    }
    out[meta.group(b)] = best;
  }
  return out;
}

MetaGraphSequence build_metagraph_sequence(const GraphSequence& seq,
                                           const std::vector<Partition>& parts,
                                           const MetadataTable* table) {
  if (parts.size() != seq.size())
    throw std::invalid_argument("need exactly one partition per phase");
  MetaGraphSequence out;
  out.metas.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    out.metas.push_back(build_metagraph(seq.phase(t), parts[t]));
    if (table) out.layer_summary.merge(dominant_label(out.metas.back(), *table));
  }
  return out;
}

}  // namespace chronoblox
