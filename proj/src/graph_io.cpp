#include "chronoblox/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace chronoblox {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string row_error(std::size_t row, const std::string& what) {
  return "row " + std::to_string(row) + ": " + what;
}

// JSON scalars used as tokens: strings verbatim, integral numbers without a
// fractional part.
bool json_token(const nlohmann::json& v, std::string& out) {
  if (v.is_string()) {
    out = v.get<std::string>();
    return true;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) {
    out = v.dump();
    return true;
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 1e15) {
      out = std::to_string(static_cast<long long>(d));
      return true;
    }
    out = v.dump();
    return true;
  }
  return false;
}

}  // namespace

double PhaseGraph::total_weight() const {
  double total = 0.0;
  for (const auto& e : edges) total += e.weight;
  return total;
}

bool PhaseGraph::contains(NodeIndex v) const {
  return std::binary_search(nodes.begin(), nodes.end(), v);
}

std::ptrdiff_t PhaseGraph::position_of(NodeIndex v) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return -1;
  return it - nodes.begin();
}

NodeIndex GraphSequence::intern(const std::string& id) {
  if (id.empty()) throw std::invalid_argument("empty node identifier");
  auto [it, inserted] = node_index_.try_emplace(id, static_cast<NodeIndex>(node_names_.size()));
  if (inserted) node_names_.push_back(id);
  return it->second;
}

bool GraphSequence::lookup(const std::string& id, NodeIndex& out) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) return false;
  out = it->second;
  return true;
}

int GraphSequence::phase_of_label(const std::string& label) const {
  for (const auto& p : phases_) {
    if (p.phase_label == label) return p.phase_index;
  }
  return -1;
}

void GraphSequence::validate() const {
  if (phases_.size() < 2) throw std::invalid_argument("fewer than 2 phases");
  for (std::size_t t = 0; t < phases_.size(); ++t) {
    const auto& p = phases_[t];
    if (p.phase_index != static_cast<int>(t))
      throw std::invalid_argument("phase indices must run 0..n-1");
    if (!std::is_sorted(p.nodes.begin(), p.nodes.end()) ||
        std::adjacent_find(p.nodes.begin(), p.nodes.end()) != p.nodes.end())
      throw std::invalid_argument("phase node list must be sorted and unique");
    for (const auto& e : p.edges) {
      if (e.u > e.v) throw std::invalid_argument("edge endpoints not canonical");
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
        throw std::invalid_argument("edge weight must be finite and non-negative");
      if (!p.contains(e.u) || !p.contains(e.v))
        throw std::invalid_argument("edge endpoint missing from phase " + p.phase_label);
    }
  }
}

void SequenceBuilder::add_node(const std::string& phase, const std::string& node) {
  pending_[phase].nodes.insert(seq_.intern(node));
}

void SequenceBuilder::add_edge(const std::string& phase, const std::string& src,
                               const std::string& dst, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("negative or non-finite weight");
  NodeIndex a = seq_.intern(src);
  NodeIndex b = seq_.intern(dst);
  if (a > b) std::swap(a, b);
  auto& p = pending_[phase];
  p.nodes.insert(a);
  p.nodes.insert(b);
  // Zero-weight rows only declare their endpoints.
  if (weight > 0.0) p.edges[{a, b}] += weight;
}

GraphSequence SequenceBuilder::build(std::size_t min_phases) {
  if (pending_.size() < min_phases)
    throw ParseError("fewer than " + std::to_string(min_phases) + " phases");

  std::vector<std::string> labels;
  labels.reserve(pending_.size());
  bool numeric = true;
  for (const auto& [label, _] : pending_) {
    labels.push_back(label);
    long long dummy = 0;
    numeric = numeric && parse_int(label, dummy);
  }
  if (numeric) {
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return std::stoll(a) < std::stoll(b);
    });
  }

  auto& phases = seq_.phases();
  phases.clear();
  for (std::size_t t = 0; t < labels.size(); ++t) {
    auto& pending = pending_.at(labels[t]);
    PhaseGraph g;
    g.phase_index = static_cast<int>(t);
    g.phase_label = labels[t];
    g.nodes.assign(pending.nodes.begin(), pending.nodes.end());
    g.edges.reserve(pending.edges.size());
    for (const auto& [key, w] : pending.edges) g.edges.push_back({key.first, key.second, w});
    phases.push_back(std::move(g));
  }
  pending_.clear();
  seq_.validate();
  return std::move(seq_);
}

EdgeFormat edge_format_from_name(const std::string& name) {
  if (name == "csv") return EdgeFormat::csv;
  if (name == "jsonl") return EdgeFormat::jsonl;
  throw std::invalid_argument("unknown edge format: " + name);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

GraphSequence parse_sequence(std::istream& in, EdgeFormat format) {
  SequenceBuilder builder;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;

    std::string phase, src, dst;
    double weight = 1.0;
    if (format == EdgeFormat::csv) {
      auto fields = split_csv_line(line);
      if (row == 1 && !fields.empty() && fields[0] == "phase") continue;
      if (fields.size() < 3 || fields.size() > 4)
        throw ParseError(row_error(row, "expected phase,src,dst[,weight]"));
      phase = fields[0];
      src = fields[1];
      dst = fields[2];
      if (fields.size() == 4 && !fields[3].empty() && !parse_double(fields[3], weight))
        throw ParseError(row_error(row, "bad weight '" + fields[3] + "'"));
    } else {
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(row_error(row, std::string("invalid JSON: ") + e.what()));
      }
      if (!obj.is_object() || !obj.contains("phase") || !obj.contains("src") ||
          !obj.contains("dst"))
        throw ParseError(row_error(row, "expected object with phase, src, dst"));
      if (!json_token(obj["phase"], phase) || !json_token(obj["src"], src) ||
          !json_token(obj["dst"], dst))
        throw ParseError(row_error(row, "phase/src/dst must be strings or numbers"));
      if (obj.contains("weight") && !obj["weight"].is_null()) {
        if (!obj["weight"].is_number()) throw ParseError(row_error(row, "weight must be numeric"));
        weight = obj["weight"].get<double>();
      }
    }
    if (phase.empty() || src.empty() || dst.empty())
      throw ParseError(row_error(row, "empty phase or node field"));
    if (weight < 0.0) throw ParseError(row_error(row, "negative weight"));
    builder.add_edge(phase, src, dst, weight);
  }
  return builder.build();
}

void write_sequence_csv(std::ostream& out, const GraphSequence& seq) {
  out << "phase,src,dst,weight\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : seq.phases()) {
    std::vector<bool> touched(p.nodes.size(), false);
    for (const auto& e : p.edges) {
      touched[p.position_of(e.u)] = true;
      touched[p.position_of(e.v)] = true;
      out << p.phase_label << ',' << seq.name(e.u) << ',' << seq.name(e.v) << ',' << e.weight
          << '\n';
    }
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      if (!touched[i]) {
        const auto& n = seq.name(p.nodes[i]);
        out << p.phase_label << ',' << n << ',' << n << ",0\n";
      }
    }
  }
}

const Labels* MetadataTable::labels_of(int phase, NodeIndex v) const {
  auto it = entries.find({phase, v});
  return it == entries.end() ? nullptr : &it->second;
}

MetadataParseResult parse_metadata(std::istream& in, const GraphSequence& seq) {
  MetadataParseResult result;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (row == 1 && !fields.empty() && fields[0] == "phase") continue;
    if (fields.size() != 3) throw ParseError(row_error(row, "expected phase,node,label"));

    const int phase = seq.phase_of_label(fields[0]);
    NodeIndex v = 0;
    if (phase < 0 || !seq.lookup(fields[1], v) || !seq.phase(phase).contains(v)) {
      ++result.skipped;
      result.warnings.push_back(row_error(row, "unknown (phase, node) (" + fields[0] + ", " +
                                                   fields[1] + "), skipped"));
      continue;
    }
    result.table.entries[{phase, v}].insert(fields[2]);
  }
  return result;
}

}  // namespace chronoblox
