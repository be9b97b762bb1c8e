#include "chronoblox/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "chronoblox/random.hpp"

namespace chronoblox {

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix core_periphery(double cc, double cp, double pp) { return {{cc, cp}, {cp, pp}}; }

std::string event_name(StructuralEvent e) {
  switch (e) {
    case StructuralEvent::add_group: return "add_group";
    case StructuralEvent::morph: return "morph";
    case StructuralEvent::none: break;
  }
  return "none";
}

StructuralEvent event_from_name(const std::string& s) {
  if (s == "none") return StructuralEvent::none;
  if (s == "add_group") return StructuralEvent::add_group;
  if (s == "morph") return StructuralEvent::morph;
  throw std::invalid_argument("unknown structural event: " + s);
}

std::string label_name(int pool_index, int pool_size) {
  const int width = static_cast<int>(std::to_string(std::max(pool_size - 1, 0)).size());
  std::ostringstream os;
  os << 'v' << std::setw(width) << std::setfill('0') << pool_index;
  return os.str();
}

class LabelPool {
 public:
  explicit LabelPool(int size) : size_(size) {
    unused_.resize(size);
    for (int i = 0; i < size; ++i) unused_[i] = i;
  }

  // `busy` holds labels that must not be drawn (previous and current phase).
  int draw(Rng& rng, const std::unordered_set<int>& busy) {
    if (!unused_.empty()) {
      const std::size_t k = rng.below(unused_.size());
      const int label = unused_[k];
      unused_[k] = unused_.back();
      unused_.pop_back();
      return label;
    }
    std::vector<int> retired;
    for (int i = 0; i < size_; ++i) {
      if (!busy.contains(i)) retired.push_back(i);
    }
    if (retired.empty()) throw std::runtime_error("label pool exhausted");
    return retired[rng.below(retired.size())];
  }

 private:
  int size_;
  std::vector<int> unused_;
};

// Removes `count` random members and returns them.
std::vector<int> take_random(std::vector<int>& members, std::size_t count, Rng& rng) {
  count = std::min(count, members.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(members.size() - i);
    std::swap(members[i], members[j]);
  }
  std::vector<int> taken(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(count));
  members.erase(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(count));
  return taken;
}

std::size_t fraction_of(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

// Visits a Bernoulli(p) subset of a sequence of rows, each row holding
// `row_length(r)` slots, using geometric skips.
template <typename RowLength, typename Emit>
void sample_rows(std::size_t rows, RowLength row_length, double p, Rng& rng, Emit emit) {
  if (p <= 0.0) return;
  const bool all = p >= 1.0;
  const double log_q = all ? 0.0 : std::log1p(-p);
  auto skip = [&]() -> std::size_t {
    if (all) return 1;
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    const double s = std::floor(std::log(u) / log_q);
    return s > 1e18 ? std::numeric_limits<std::size_t>::max() / 2 : static_cast<std::size_t>(s) + 1;
  };
  std::size_t cursor = skip() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t len = row_length(r);
    while (cursor < len) {
      emit(r, cursor);
      cursor += skip();
    }
    cursor -= len;
  }
}

}  // namespace

void Scenario::validate() const {
  if (steps.empty()) throw std::invalid_argument("scenario has no steps");
  if (label_pool_size < 1) throw std::invalid_argument("label pool must be positive");
  std::set<std::string> previous;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& s = steps[t];
    const std::string where = "step " + std::to_string(t) + ": ";
    std::set<std::string> names;
    long long total = 0;
    for (const auto& g : s.groups) {
      if (g.name.empty() || !names.insert(g.name).second)
        throw std::invalid_argument(where + "group names must be unique and non-empty");
      if (g.target_size < 1) throw std::invalid_argument(where + "group sizes must be >= 1");
      total += g.target_size;
    }
    if (s.groups.empty()) throw std::invalid_argument(where + "no groups");
    if (total > label_pool_size) throw std::invalid_argument(where + "groups exceed the label pool");
    const std::size_t k = s.groups.size();
    if (s.block_matrix.size() != k) throw std::invalid_argument(where + "block matrix size mismatch");
    for (std::size_t a = 0; a < k; ++a) {
      if (s.block_matrix[a].size() != k)
        throw std::invalid_argument(where + "block matrix size mismatch");
      for (std::size_t b = 0; b < k; ++b) {
        const double p = s.block_matrix[a][b];
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(where + "probability outside [0,1]");
        if (p != s.block_matrix[b][a]) throw std::invalid_argument(where + "block matrix not symmetric");
      }
    }
    for (const auto& [name, f] : s.turnover) {
      if (!names.contains(name)) throw std::invalid_argument(where + "turnover for unknown group " + name);
      if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument(where + "turnover outside [0,1]");
    }
    for (const auto& m : s.moves) {
      if (!previous.contains(m.from) && !names.contains(m.from))
        throw std::invalid_argument(where + "move from unknown group " + m.from);
      if (!names.contains(m.to)) throw std::invalid_argument(where + "move to unknown group " + m.to);
      if (!(m.fraction >= 0.0 && m.fraction <= 1.0))
        throw std::invalid_argument(where + "move fraction outside [0,1]");
    }
    previous = names;
  }
}

Scenario default_scenario(std::uint64_t seed, const ScenarioParams& params) {
  const double s = params.scale;
  if (!(s > 0.0)) throw std::invalid_argument("scale must be positive");
  auto size = [s](int n) { return std::max(1, static_cast<int>(std::lround(n * s))); };
  const double boost = params.keep_degrees ? 1.0 / s : 1.0;
  auto prob = [boost](double p) { return std::min(1.0, p * boost); };

  const double cc = prob(0.05), cp = prob(0.02), pp = prob(0.002), p12 = prob(0.001);
  const double in = prob(0.05), out = prob(0.002);
  const Matrix two = core_periphery(cc, cp, pp);
  const Matrix three = {{cc, cp, cp}, {cp, pp, p12}, {cp, p12, pp}};
  const Matrix four = {{cc, cp, cp, out}, {cp, pp, p12, out}, {cp, p12, pp, out}, {out, out, out, in}};

  const double slight = params.slight_turnover;
  const double higher = params.higher_turnover;
  const double renew = params.renewal;

  Scenario scn;
  scn.seed = seed;
  scn.label_pool_size = size(11000);
  auto step = [&](std::vector<GroupSpec> groups, const Matrix& m,
                  std::map<std::string, double> turnover, std::vector<MemberMove> moves = {},
                  StructuralEvent e = StructuralEvent::none) {
    for (auto& g : groups) g.target_size = size(g.target_size);
    scn.steps.push_back({std::move(groups), m, std::move(turnover), std::move(moves), e});
  };
  const std::vector<MemberMove> drift = {{"periphery", "core", params.periphery_to_core}};

  step({{"core", 800}, {"periphery", 2400}}, two, {});
  step({{"core", 840}, {"periphery", 2360}}, two, {{"core", slight}, {"periphery", slight}}, drift);
  step({{"core", 880}, {"periphery", 2320}}, two, {{"core", slight}, {"periphery", slight}}, drift);
  step({{"core", 920}, {"periphery", 2280}}, two, {{"core", slight}, {"periphery", slight}}, drift);
  step({{"core", 920}, {"periphery", 2280}}, two, {{"core", slight}, {"periphery", higher}});
  step({{"core", 920}, {"periphery", 2280}}, two, {{"core", slight}, {"periphery", higher}});
  step({{"core", 920}, {"periphery", 2280}, {"periphery2", 700}}, three,
       {{"core", slight}, {"periphery", slight}}, {}, StructuralEvent::add_group);
  step({{"core", 920}, {"periphery", 2280}, {"periphery2", 700}}, three,
       {{"core", renew}, {"periphery", renew}, {"periphery2", renew}});
  step({{"core", 830}, {"periphery", 2010}, {"periphery2", 560}, {"cluster", 500}}, four, {},
       {{"core", "cluster", 0.10}, {"periphery", "cluster", 0.12}, {"periphery2", "cluster", 0.20}},
       StructuralEvent::morph);
  step({{"core", 830}, {"periphery", 2010}, {"periphery2", 560}, {"cluster", 500}}, four,
       {{"core", renew}, {"periphery", renew}, {"periphery2", renew}, {"cluster", renew}});
  step({{"core", 830}, {"periphery", 2010}, {"periphery2", 560}, {"cluster", 500}}, four,
       {{"core", slight}, {"periphery", slight}, {"periphery2", slight}, {"cluster", slight}});
  return scn;
}

GeneratedSequence generate(const Scenario& scn) {
  scn.validate();
  Rng rng(derive_seed(scn.seed, 0x73796e74ULL));
  LabelPool pool(scn.label_pool_size);

  std::vector<std::string> names(scn.label_pool_size);
  for (int i = 0; i < scn.label_pool_size; ++i) names[i] = label_name(i, scn.label_pool_size);

  SequenceBuilder builder;
  std::vector<std::vector<std::vector<int>>> memberships;  // step -> group -> labels
  std::map<std::string, std::vector<int>> previous;
  std::unordered_set<int> previous_labels;

  for (std::size_t t = 0; t < scn.steps.size(); ++t) {
    const auto& step = scn.steps[t];
    std::map<std::string, std::vector<int>> current;
    for (const auto& g : step.groups) {
      auto it = previous.find(g.name);
      current[g.name] = it == previous.end() ? std::vector<int>{} : it->second;
    }

    for (const auto& m : step.moves) {
      auto src = current.find(m.from);
      if (src == current.end()) continue;  // group dropped this step
      auto moved = take_random(src->second, fraction_of(m.fraction, src->second.size()), rng);
      auto& dst = current[m.to];
      dst.insert(dst.end(), moved.begin(), moved.end());
    }

    std::unordered_set<int> busy = previous_labels;
    for (const auto& [_, members] : current) busy.insert(members.begin(), members.end());
    auto fresh = [&]() {
      const int label = pool.draw(rng, busy);
      busy.insert(label);
      return label;
    };

    for (const auto& g : step.groups) {
      auto& members = current[g.name];
      if (auto it = step.turnover.find(g.name); it != step.turnover.end()) {
        const auto replaced = take_random(members, fraction_of(it->second, members.size()), rng);
        for (std::size_t i = 0; i < replaced.size(); ++i) members.push_back(fresh());
      }
      const auto target = static_cast<std::size_t>(g.target_size);
      if (members.size() > target) take_random(members, members.size() - target, rng);
      while (members.size() < target) members.push_back(fresh());
    }

    const std::string phase = std::to_string(t);
    std::vector<std::vector<int>> groups;
    for (const auto& g : step.groups) {
      auto members = current[g.name];
      std::sort(members.begin(), members.end());
      for (int v : members) builder.add_node(phase, names[v]);
      groups.push_back(std::move(members));
    }

    const std::size_t k = groups.size();
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) {
        const auto& ga = groups[a];
        const auto& gb = groups[b];
        const double p = step.block_matrix[a][b];
        auto emit = [&](std::size_t r, std::size_t c) {
          const int u = ga[r];
          const int v = a == b ? ga[r + 1 + c] : gb[c];
          builder.add_edge(phase, names[u], names[v], 1.0);
        };
        if (a == b) {
          sample_rows(ga.size(), [&](std::size_t r) { return ga.size() - 1 - r; }, p, rng, emit);
        } else {
          sample_rows(ga.size(), [&](std::size_t) { return gb.size(); }, p, rng, emit);
        }
      }
    }

    memberships.push_back(std::move(groups));
    previous = std::move(current);
    previous_labels.clear();
    for (const auto& [_, members] : previous) previous_labels.insert(members.begin(), members.end());
  }

  GeneratedSequence out;
  out.sequence = builder.build(1);
  for (std::size_t t = 0; t < scn.steps.size(); ++t) {
    const auto& phase = out.sequence.phase(t);
    Partition part;
    part.phase_index = static_cast<int>(t);
    part.assignment.assign(phase.nodes.size(), -1);
    for (const auto& g : scn.steps[t].groups) part.group_names.push_back(g.name);
    for (std::size_t g = 0; g < memberships[t].size(); ++g) {
      for (int label : memberships[t][g]) {
        NodeIndex v = 0;
        out.sequence.lookup(names[label], v);
        part.assignment[phase.position_of(v)] = static_cast<int>(g);
      }
    }
    out.partitions.push_back(std::move(part));
  }
  return out;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario scn;
  scn.label_pool_size = j.value("label_pool_size", 11000);
  scn.seed = j.value("seed", std::uint64_t{0});
  for (const auto& js : j.at("steps")) {
    ScenarioStep step;
    for (const auto& g : js.at("groups"))
      step.groups.push_back({g.at("name").get<std::string>(), g.at("size").get<int>()});
    step.block_matrix = js.at("block_matrix").get<Matrix>();
    if (js.contains("turnover")) step.turnover = js["turnover"].get<std::map<std::string, double>>();
    if (js.contains("moves")) {
      for (const auto& m : js["moves"])
        step.moves.push_back({m.at("from").get<std::string>(), m.at("to").get<std::string>(),
                              m.at("fraction").get<double>()});
    }
    step.event = event_from_name(js.value("event", std::string("none")));
    scn.steps.push_back(std::move(step));
  }
  scn.validate();
  return scn;
}

nlohmann::json scenario_to_json(const Scenario& scn) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : scn.steps) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : s.groups) groups.push_back({{"name", g.name}, {"size", g.target_size}});
    nlohmann::json moves = nlohmann::json::array();
    for (const auto& m : s.moves) moves.push_back({{"from", m.from}, {"to", m.to}, {"fraction", m.fraction}});
    steps.push_back({{"groups", groups},
                     {"block_matrix", s.block_matrix},
                     {"turnover", s.turnover},
                     {"moves", moves},
                     {"event", event_name(s.event)}});
  }
  return {{"label_pool_size", scn.label_pool_size}, {"seed", scn.seed}, {"steps", steps}};
}

}  // namespace chronoblox
