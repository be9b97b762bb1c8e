#include "chronoblox/similarity.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace chronoblox {

double jaccard(std::span<const NodeIndex> a, std::span<const NodeIndex> b) {
  if (a.empty() && b.empty()) throw std::invalid_argument("jaccard of two empty sets");
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

SimilarityMatrix::SimilarityMatrix(std::vector<GroupId> order, std::vector<SimilarityEntry> entries)
    : order_(std::move(order)), entries_(std::move(entries)) {
  if (!std::is_sorted(order_.begin(), order_.end()))
    throw std::invalid_argument("similarity order must be sorted");
  for (auto& e : entries_) {
    if (e.a == e.b) throw std::invalid_argument("self-similarity entries are not stored");
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a < 0 || static_cast<std::size_t>(e.b) >= order_.size())
      throw std::invalid_argument("similarity entry index out of range");
    if (!(e.value > 0.0 && e.value <= 1.0))
      throw std::invalid_argument("similarity values must lie in (0, 1]");
  }
  std::sort(entries_.begin(), entries_.end(), [](const auto& x, const auto& y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
}

int SimilarityMatrix::index_of(const GroupId& g) const {
  auto it = std::lower_bound(order_.begin(), order_.end(), g);
  if (it == order_.end() || *it != g) return -1;
  return static_cast<int>(it - order_.begin());
}

double SimilarityMatrix::value(const GroupId& a, const GroupId& b) const {
  int ia = index_of(a);
  int ib = index_of(b);
  if (ia < 0 || ib < 0 || ia == ib) return 0.0;
  if (ia > ib) std::swap(ia, ib);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair(ia, ib),
                             [](const SimilarityEntry& e, const std::pair<int, int>& key) {
                               return std::pair(e.a, e.b) < key;
                             });
  if (it == entries_.end() || it->a != ia || it->b != ib) return 0.0;
  return it->value;
}

std::vector<std::vector<std::pair<int, double>>> SimilarityMatrix::adjacency() const {
  std::vector<std::vector<std::pair<int, double>>> adj(order_.size());
  for (const auto& e : entries_) {
    adj[e.a].emplace_back(e.b, e.value);
    adj[e.b].emplace_back(e.a, e.value);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

SimilarityMatrix build_similarity(const MetaGraphSequence& seq) {
  std::vector<GroupId> order;
  std::vector<std::size_t> sizes;
  NodeIndex max_node = 0;
  for (const auto& meta : seq.metas) {
    for (int b = 0; b < meta.group_count(); ++b) {
      order.push_back(meta.group(b));
      sizes.push_back(meta.members[b].size());
      for (NodeIndex v : meta.members[b]) max_node = std::max(max_node, v);
    }
  }

  std::vector<std::vector<int>> groups_of(static_cast<std::size_t>(max_node) + 1);
  {
    int g = 0;
    for (const auto& meta : seq.metas) {
      for (const auto& members : meta.members) {
        for (NodeIndex v : members) groups_of[v].push_back(g);
        ++g;
      }
    }
  }

  std::unordered_map<std::uint64_t, std::size_t> overlap;
  for (const auto& gs : groups_of) {
    for (std::size_t i = 0; i < gs.size(); ++i) {
      for (std::size_t j = i + 1; j < gs.size(); ++j) {
        const auto a = static_cast<std::uint64_t>(std::min(gs[i], gs[j]));
        const auto b = static_cast<std::uint64_t>(std::max(gs[i], gs[j]));
        ++overlap[(a << 32) | b];
      }
    }
  }

  std::vector<SimilarityEntry> entries;
  entries.reserve(overlap.size());
  for (const auto& [key, common] : overlap) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffULL);
    const double uni = static_cast<double>(sizes[a] + sizes[b] - common);
    entries.push_back({a, b, static_cast<double>(common) / uni});
  }
  return SimilarityMatrix(std::move(order), std::move(entries));
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& m) {
  out << "phase_a,group_a,phase_b,group_b,jaccard\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : m.entries()) {
    const auto& a = m.order()[e.a];
    const auto& b = m.order()[e.b];
    out << a.phase << ',' << a.local << ',' << b.phase << ',' << b.local << ',' << e.value << '\n';
  }
}

}  // namespace chronoblox
