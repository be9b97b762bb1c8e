#include "chronoblox/lineage.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace chronoblox {

namespace {

// Share/HHI comparisons tolerate rounding so that k equal links (share 1/k,
// HHI k/k^2) stay on the inclusive boundary.
constexpr double kShareTolerance = 1e-12;

struct Concentration {
  double sum = 0.0;
  double sum_sq = 0.0;

  double hhi() const { return sum_sq / (sum * sum); }
  bool dominant(double w) const { return w / sum >= hhi() - kShareTolerance; }
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins, so each root is its component's smallest member.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

int LineageGraph::lineage_count() const {
  std::set<LineageId> ids;
  for (const auto& [_, id] : lineage_of) ids.insert(id);
  return static_cast<int>(ids.size());
}

std::vector<InterTemporalLink> adjacent_links(const SimilarityMatrix& m) {
  std::vector<InterTemporalLink> out;
  for (const auto& e : m.entries()) {
    GroupId a = m.order()[e.a];
    GroupId b = m.order()[e.b];
    if (b < a) std::swap(a, b);
    if (b.phase == a.phase + 1) out.push_back({a, b, e.value});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::pair(x.parent, x.child) < std::pair(y.parent, y.child);
  });
  return out;
}

std::vector<bool> hhi_keep_mask(const std::vector<InterTemporalLink>& links) {
  std::map<GroupId, Concentration> outgoing, incoming;
  for (const auto& l : links) {
    if (!(l.weight > 0.0)) throw std::invalid_argument("hhi_filter: non-positive link weight");
    auto& o = outgoing[l.parent];
    o.sum += l.weight;
    o.sum_sq += l.weight * l.weight;
    auto& i = incoming[l.child];
    i.sum += l.weight;
    i.sum_sq += l.weight * l.weight;
  }
  std::vector<bool> keep;
  keep.reserve(links.size());
  for (const auto& l : links)
    keep.push_back(outgoing[l.parent].dominant(l.weight) && incoming[l.child].dominant(l.weight));
  return keep;
}

std::vector<InterTemporalLink> hhi_filter(const std::vector<InterTemporalLink>& links) {
  const auto keep = hhi_keep_mask(links);
  std::vector<InterTemporalLink> out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (keep[i]) out.push_back(links[i]);
  }
  return out;
}

LineageGraph lineages(const std::vector<InterTemporalLink>& filtered,
                      const std::vector<GroupId>& all_groups) {
  std::vector<GroupId> groups = all_groups;
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  auto index = [&](const GroupId& g) {
    auto it = std::lower_bound(groups.begin(), groups.end(), g);
    if (it == groups.end() || *it != g)
      throw std::invalid_argument("lineages: link references unknown group " + to_string(g));
    return static_cast<std::size_t>(it - groups.begin());
  };

  DisjointSets sets(groups.size());
  for (const auto& l : filtered) sets.unite(index(l.parent), index(l.child));

  LineageGraph out;
  out.links = filtered;
  std::map<std::size_t, LineageId> dense;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto [it, _] = dense.try_emplace(sets.find(i), static_cast<LineageId>(dense.size()));
    out.lineage_of[groups[i]] = it->second;
  }
  return out;
}

void write_links_csv(std::ostream& out, const std::vector<InterTemporalLink>& links,
                     const std::vector<bool>& kept) {
  out << "parent_phase,parent_group,child_phase,child_group,weight,kept\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    out << l.parent.phase << ',' << l.parent.local << ',' << l.child.phase << ','
        << l.child.local << ',' << l.weight << ',' << (kept[i] ? "true" : "false") << '\n';
  }
}

}  // namespace chronoblox
