#include "chronoblox/grouping.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "chronoblox/random.hpp"

namespace chronoblox {

namespace {

constexpr double kPassImprovement = 1e-9;
constexpr double kMoveEpsilon = 1e-12;

struct WorkGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;  // no self-loops
  std::vector<double> self;                               // self-loop weight
  std::vector<double> degree;
  double total = 0.0;

  int size() const { return static_cast<int>(adj.size()); }
};

WorkGraph work_graph_of(const PhaseGraph& phase) {
  const int n = static_cast<int>(phase.nodes.size());
  WorkGraph g;
  g.adj.resize(n);
  g.self.assign(n, 0.0);
  g.degree.assign(n, 0.0);
  for (const auto& e : phase.edges) {
    const int a = static_cast<int>(phase.position_of(e.u));
    const int b = static_cast<int>(phase.position_of(e.v));
    g.total += e.weight;
    if (a == b) {
      g.self[a] += e.weight;
      g.degree[a] += 2.0 * e.weight;
    } else {
      g.adj[a].emplace_back(b, e.weight);
      g.adj[b].emplace_back(a, e.weight);
      g.degree[a] += e.weight;
      g.degree[b] += e.weight;
    }
  }
  return g;
}

// Renumbers community labels densely in order of first appearance.
int densify(std::vector<int>& comm) {
  std::unordered_map<int, int> remap;
  for (auto& c : comm) {
    auto [it, inserted] = remap.try_emplace(c, static_cast<int>(remap.size()));
    c = it->second;
  }
  return static_cast<int>(remap.size());
}

// Single-node local moving until a pass gains no more than kPassImprovement.
// Returns true if any node changed community.
bool local_moving(const WorkGraph& g, std::vector<int>& comm, Rng& rng) {
  const int n = g.size();
  if (g.total <= 0.0) return false;
  const double two_m = 2.0 * g.total;

  std::vector<double> tot(n, 0.0);
  for (int i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<double> neigh_weight(n, 0.0);
  std::vector<int> neigh_comms;
  bool moved_any = false;

  for (;;) {
    double improvement = 0.0;
    for (int i : order) {
      const int old_comm = comm[i];
      const double k_i = g.degree[i];

      neigh_comms.clear();
      for (const auto& [j, w] : g.adj[i]) {
        const int c = comm[j];
        if (neigh_weight[c] == 0.0) neigh_comms.push_back(c);
        neigh_weight[c] += w;
      }
      tot[old_comm] -= k_i;

      const double stay_gain = neigh_weight[old_comm] - tot[old_comm] * k_i / two_m;
      int best = old_comm;
      double best_gain = stay_gain;
      std::sort(neigh_comms.begin(), neigh_comms.end());
      for (int c : neigh_comms) {
        if (c == old_comm) continue;
        const double gain = neigh_weight[c] - tot[c] * k_i / two_m;
        if ((gain - best_gain) / g.total > kMoveEpsilon) {
          best = c;
          best_gain = gain;
        }
      }

      tot[best] += k_i;
      comm[i] = best;
      if (best != old_comm) {
        moved_any = true;
        improvement += (best_gain - stay_gain) / g.total;
      }
      for (int c : neigh_comms) neigh_weight[c] = 0.0;
      neigh_weight[old_comm] = 0.0;
    }
    if (improvement <= kPassImprovement) break;
  }
  return moved_any;
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<int>& comm, int k) {
  WorkGraph out;
  out.adj.resize(k);
  out.self.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  out.total = g.total;
  std::vector<std::map<int, double>> links(k);
  for (int i = 0; i < g.size(); ++i) {
    const int ci = comm[i];
    out.degree[ci] += g.degree[i];
    out.self[ci] += g.self[i];
    for (const auto& [j, w] : g.adj[i]) {
      const int cj = comm[j];
      if (ci == cj) {
        if (i < j) out.self[ci] += w;
      } else {
        links[ci][cj] += w;
      }
    }
  }
  for (int c = 0; c < k; ++c) {
    for (const auto& [d, w] : links[c]) out.adj[c].emplace_back(d, w);
  }
  return out;
}

}  // namespace

int Partition::group_count() const {
  if (assignment.empty()) return 0;
  return *std::max_element(assignment.begin(), assignment.end()) + 1;
}

double modularity(const PhaseGraph& phase, const std::vector<int>& assignment) {
  if (assignment.size() != phase.nodes.size())
    throw std::invalid_argument("assignment does not cover the phase");
  const double m = phase.total_weight();
  if (m <= 0.0) return 0.0;
  std::map<int, double> internal, degree;
  for (const auto& e : phase.edges) {
    const int a = assignment[phase.position_of(e.u)];
    const int b = assignment[phase.position_of(e.v)];
    degree[a] += e.weight;
    degree[b] += e.weight;
    if (a == b) internal[a] += e.weight;
  }
  double q = 0.0;
  for (const auto& [c, in] : internal) q += in / m;
  for (const auto& [c, k] : degree) q -= (k / (2.0 * m)) * (k / (2.0 * m));
  return q;
}

Partition louvain(const PhaseGraph& phase, std::uint64_t seed) {
  if (phase.nodes.empty()) throw std::invalid_argument("louvain: empty phase");
  const int n = static_cast<int>(phase.nodes.size());

  const WorkGraph base = work_graph_of(phase);
  std::vector<int> membership(n);
  std::iota(membership.begin(), membership.end(), 0);

  WorkGraph level_graph = base;
  for (std::uint64_t level = 0;; ++level) {
    std::vector<int> comm(level_graph.size());
    std::iota(comm.begin(), comm.end(), 0);
    Rng rng(derive_seed(seed, 0x6c6f7576ULL, level));
    if (!local_moving(level_graph, comm, rng)) break;
    const int k = densify(comm);
    for (auto& c : membership) c = comm[c];
    if (k == level_graph.size()) break;
    level_graph = aggregate(level_graph, comm, k);
  }

  Rng refine_rng(derive_seed(seed, 0x72656669ULL));
  local_moving(base, membership, refine_rng);
  densify(membership);

  Partition p;
  p.phase_index = phase.phase_index;
  p.assignment = std::move(membership);
  return p;
}

std::vector<Partition> import_partition(std::istream& in, const GraphSequence& seq) {
  std::vector<Partition> parts(seq.size());
  std::vector<std::unordered_map<std::string, int>> dense(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    parts[t].phase_index = static_cast<int>(t);
    parts[t].assignment.assign(seq.phase(t).nodes.size(), -1);
  }

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (row == 1 && !fields.empty() && fields[0] == "phase") continue;
    const std::string where = "row " + std::to_string(row) + ": ";
    if (fields.size() != 3 || fields[2].empty())
      throw ParseError(where + "expected phase,node,group");

    const int t = seq.phase_of_label(fields[0]);
    NodeIndex v = 0;
    const std::ptrdiff_t pos =
        (t >= 0 && seq.lookup(fields[1], v)) ? seq.phase(t).position_of(v) : -1;
    if (pos < 0)
      throw ParseError(where + "assignment for unknown node (" + fields[0] + ", " + fields[1] +
                       ")");
    auto& slot = parts[t].assignment[pos];
    if (slot >= 0)
      throw ParseError(where + "duplicate assignment for (" + fields[0] + ", " + fields[1] + ")");

    auto [it, inserted] = dense[t].try_emplace(fields[2], static_cast<int>(dense[t].size()));
    if (inserted) parts[t].group_names.push_back(fields[2]);
    slot = it->second;
  }

  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto& phase = seq.phase(t);
    for (std::size_t i = 0; i < phase.nodes.size(); ++i) {
      if (parts[t].assignment[i] < 0)
        throw ParseError("missing assignment for (" + phase.phase_label + ", " +
                         seq.name(phase.nodes[i]) + ")");
    }
  }
  return parts;
}

void write_partition_csv(std::ostream& out, const GraphSequence& seq,
                         const std::vector<Partition>& partitions) {
  // Rows are grouped by dense id so re-importing keeps the group numbering.
  out << "phase,node,group\n";
  for (const auto& part : partitions) {
    const auto& phase = seq.phase(part.phase_index);
    for (int g = 0; g < part.group_count(); ++g) {
      for (std::size_t i = 0; i < phase.nodes.size(); ++i) {
        if (part.assignment[i] != g) continue;
        out << phase.phase_label << ',' << seq.name(phase.nodes[i]) << ',';
        if (static_cast<std::size_t>(g) < part.group_names.size())
          out << part.group_names[g];
        else
          out << g;
        out << '\n';
      }
    }
  }
}

}  // namespace chronoblox
