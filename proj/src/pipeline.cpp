#include "chronoblox/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "chronoblox/random.hpp"

namespace chronoblox {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

EdgeFormat infer_format(const RunOptions& options) {
  if (options.edge_format) return edge_format_from_name(*options.edge_format);
  const auto ext = fs::path(options.edges).extension().string();
  return ext == ".jsonl" || ext == ".ndjson" ? EdgeFormat::jsonl : EdgeFormat::csv;
}

// Tracks files written by a run so they can be removed if a later stage fails.
class OutputSet {
 public:
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

  void write(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty()) return;
    const std::string tmp = path + ".partial";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path);
      written_.push_back(tmp);
      body(out);
      if (!out) throw std::runtime_error("write failed for " + path);
    }
    fs::rename(tmp, path);
    written_.back() = path;
  }

  void commit() { committed_ = true; }

 private:
  std::vector<std::string> written_;
  bool committed_ = false;
};

json group_ref(const GroupId& g) { return {{"phase", g.phase}, {"local_id", g.local}}; }

bool finite_number(const json& v) { return v.is_number() && std::isfinite(v.get<double>()); }

}  // namespace

GroupingMode grouping_mode_from_name(const std::string& name) {
  if (name == "louvain") return GroupingMode::louvain;
  if (name == "import") return GroupingMode::import_file;
  throw std::invalid_argument("unknown grouping mode: " + name);
}

std::string grouping_mode_name(GroupingMode mode) {
  return mode == GroupingMode::louvain ? "louvain" : "import";
}

json config_to_json(const PipelineConfig& c) {
  return {
      {"grouping", grouping_mode_name(c.grouping)},
      {"seed", c.seed},
      {"deterministic", c.deterministic},
      {"walks",
       {{"walks_per_node", c.walks.walks_per_node},
        {"walk_length", c.walks.walk_length},
        {"p", c.walks.p},
        {"q", c.walks.q}}},
      {"skipgram",
       {{"dim", c.skipgram.dim},
        {"window", c.skipgram.window},
        {"negatives", c.skipgram.negatives},
        {"epochs", c.skipgram.epochs},
        {"lr", c.skipgram.lr}}},
      {"pacmap",
       {{"n_neighbors", c.pacmap.n_neighbors},
        {"mid_near_ratio", c.pacmap.mid_near_ratio},
        {"further_ratio", c.pacmap.further_ratio},
        {"iterations", c.pacmap.iterations},
        {"phase1_end", c.pacmap.phase1_end},
        {"phase2_end", c.pacmap.phase2_end},
        {"learning_rate", c.pacmap.learning_rate}}},
  };
}

void apply_config_json(PipelineConfig& c, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  auto take = [](const json& obj, const char* key, auto& field) {
    if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
  };
  if (j.contains("grouping")) c.grouping = grouping_mode_from_name(j["grouping"].get<std::string>());
  take(j, "seed", c.seed);
  take(j, "deterministic", c.deterministic);
  take(j, "threads", c.threads);
  if (j.contains("walks")) {
    const auto& w = j["walks"];
    take(w, "walks_per_node", c.walks.walks_per_node);
    take(w, "walk_length", c.walks.walk_length);
    take(w, "p", c.walks.p);
    take(w, "q", c.walks.q);
  }
  if (j.contains("skipgram")) {
    const auto& s = j["skipgram"];
    take(s, "dim", c.skipgram.dim);
    take(s, "window", c.skipgram.window);
    take(s, "negatives", c.skipgram.negatives);
    take(s, "epochs", c.skipgram.epochs);
    take(s, "lr", c.skipgram.lr);
  }
  if (j.contains("pacmap")) {
    const auto& p = j["pacmap"];
    take(p, "n_neighbors", c.pacmap.n_neighbors);
    take(p, "mid_near_ratio", c.pacmap.mid_near_ratio);
    take(p, "further_ratio", c.pacmap.further_ratio);
    take(p, "iterations", c.pacmap.iterations);
    take(p, "phase1_end", c.pacmap.phase1_end);
    take(p, "phase2_end", c.pacmap.phase2_end);
    take(p, "learning_rate", c.pacmap.learning_rate);
  }
}

PipelineResult run_stages(const GraphSequence& seq, const PipelineConfig& config,
                          const std::vector<Partition>* imported, const MetadataTable* metadata) {
  PipelineResult r;

  r.partitions = stage("group", [&] {
    if (config.grouping == GroupingMode::import_file) {
      if (!imported) throw std::invalid_argument("import grouping needs a partition file");
      if (imported->size() != seq.size())
        throw std::invalid_argument("partition count does not match phase count");
      return *imported;
    }
    std::vector<Partition> parts;
    for (const auto& phase : seq.phases())
      parts.push_back(louvain(phase, derive_seed(config.seed, 0x6c6f7576ULL,
                                                 static_cast<std::uint64_t>(phase.phase_index))));
    return parts;
  });

  r.metas = stage("metagraph", [&] { return build_metagraph_sequence(seq, r.partitions, metadata); });
  r.similarity = stage("similarity", [&] { return build_similarity(r.metas); });

  stage("embed", [&] {
    WalkConfig walks = config.walks;
    walks.threads = config.deterministic ? 1 : config.threads;
    r.corpus = random_walks(r.similarity, walks, derive_seed(config.seed, 0x77616c6bULL));
    SkipGramConfig sg = config.skipgram;
    sg.deterministic = config.deterministic;
    sg.threads = config.threads;
    r.embedding = skipgram_train(r.corpus, sg, derive_seed(config.seed, 0x73676e73ULL));
    return 0;
  });

  stage("project", [&] {
    std::string notice;
    r.layout.coords2d =
        pacmap_project(r.embedding, derive_seed(config.seed, 0x70636d70ULL), config.pacmap, &notice);
    if (!notice.empty()) r.notices.push_back(notice);
    r.layout.alluvial1d = pca_axis(r.layout.coords2d);
    return 0;
  });

  stage("lineage", [&] {
    r.links = adjacent_links(r.similarity);
    r.kept = hhi_keep_mask(r.links);
    std::vector<InterTemporalLink> filtered;
    for (std::size_t i = 0; i < r.links.size(); ++i)
      if (r.kept[i]) filtered.push_back(r.links[i]);
    r.lineage = lineages(filtered, r.similarity.order());
    return 0;
  });
  return r;
}

json make_artifact(const GraphSequence& seq, const PipelineResult& r, const PipelineConfig& config) {
  json labels = json::array();
  for (const auto& p : seq.phases()) labels.push_back(p.phase_label);

  json groups = json::array();
  for (const auto& meta : r.metas.metas) {
    for (int b = 0; b < meta.group_count(); ++b) {
      const GroupId g = meta.group(b);
      const auto& xy = r.layout.coords2d.at(g);
      const auto label = r.metas.layer_summary.find(g);
      json entry = {
          {"phase", g.phase},
          {"local_id", g.local},
          {"x", xy.x},
          {"y", xy.y},
          {"alluvial", r.layout.alluvial1d.at(g)},
          {"size", meta.members[b].size()},
          {"dominant_label", label == r.metas.layer_summary.end() ? kNoLabel : label->second},
          {"lineage_id", r.lineage.lineage_of.at(g)},
      };
      if (static_cast<std::size_t>(b) < meta.group_names.size()) entry["name"] = meta.group_names[b];
      groups.push_back(std::move(entry));
    }
  }

  json intra = json::array();
  for (const auto& meta : r.metas.metas) {
    for (const auto& [key, w] : meta.edges)
      intra.push_back({{"phase", meta.phase_index}, {"a", key.first}, {"b", key.second}, {"weight", w}});
  }

  json inter = json::array();
  for (std::size_t i = 0; i < r.links.size(); ++i) {
    const auto& l = r.links[i];
    inter.push_back({{"parent", group_ref(l.parent)},
                     {"child", group_ref(l.child)},
                     {"weight", l.weight},
                     {"kept", static_cast<bool>(r.kept[i])}});
  }

  return {
      {"schema_version", 1},
      {"meta",
       {{"n_phases", seq.size()},
        {"phase_labels", labels},
        {"seed", config.seed},
        {"config", config_to_json(config)}}},
      {"groups", groups},
      {"intra_edges", intra},
      {"inter_links", inter},
  };
}

std::string artifact_text(const json& artifact) { return artifact.dump(1) + "\n"; }

std::vector<std::string> validate_artifact(const json& a) {
  std::vector<std::string> findings;
  auto fail = [&](std::string msg) { findings.push_back(std::move(msg)); };

  if (!a.is_object()) return {"artifact is not a JSON object"};
  if (!a.contains("schema_version") || a["schema_version"] != 1) fail("schema_version must be 1");

  int n_phases = -1;
  if (!a.contains("meta") || !a["meta"].is_object()) {
    fail("missing meta object");
  } else {
    const auto& meta = a["meta"];
    if (!meta.contains("n_phases") || !meta["n_phases"].is_number_integer()) {
      fail("meta.n_phases missing");
    } else {
      n_phases = meta["n_phases"].get<int>();
      if (!meta.contains("phase_labels") || !meta["phase_labels"].is_array() ||
          static_cast<int>(meta["phase_labels"].size()) != n_phases)
        fail("meta.phase_labels must list n_phases labels");
    }
  }

  for (const char* key : {"groups", "intra_edges", "inter_links"}) {
    if (!a.contains(key) || !a[key].is_array()) {
      fail(std::string("missing array ") + key);
      return findings;
    }
  }

  std::map<GroupId, int> lineage_of;
  for (const auto& g : a["groups"]) {
    if (!g.is_object() || !g.contains("phase") || !g.contains("local_id") ||
        !g["phase"].is_number_integer() || !g["local_id"].is_number_integer()) {
      fail("group without integer phase/local_id");
      continue;
    }
    const GroupId id{g["phase"].get<int>(), g["local_id"].get<int>()};
    const std::string name = "group " + to_string(id);
    if (n_phases >= 0 && (id.phase < 0 || id.phase >= n_phases)) fail(name + ": phase out of range");
    for (const char* c : {"x", "y", "alluvial"}) {
      if (!g.contains(c) || !finite_number(g[c])) fail("non-finite coordinate " + std::string(c) + " in " + name);
    }
    if (!g.contains("size") || !g["size"].is_number_integer() || g["size"].get<long long>() < 1)
      fail(name + ": size must be a positive integer");
    if (!g.contains("dominant_label") || !g["dominant_label"].is_string())
      fail(name + ": missing dominant_label");
    int lineage = -1;
    if (!g.contains("lineage_id") || !g["lineage_id"].is_number_integer())
      fail(name + ": missing lineage_id");
    else
      lineage = g["lineage_id"].get<int>();
    if (!lineage_of.emplace(id, lineage).second) fail("duplicate " + name);
  }

  for (const auto& e : a["intra_edges"]) {
    if (!e.is_object() || !e.contains("phase") || !e.contains("a") || !e.contains("b") ||
        !e["phase"].is_number_integer() || !e["a"].is_number_integer() || !e["b"].is_number_integer()) {
      fail("malformed intra edge");
      continue;
    }
    const int phase = e["phase"].get<int>();
    for (const char* end : {"a", "b"}) {
      const GroupId id{phase, e[end].get<int>()};
      if (!lineage_of.contains(id)) fail("dangling edge endpoint " + to_string(id));
    }
    if (!e.contains("weight") || !finite_number(e["weight"]) || e["weight"].get<double>() < 0.0)
      fail("intra edge with invalid weight in phase " + std::to_string(phase));
  }

  std::vector<InterTemporalLink> links;
  std::vector<bool> kept;
  bool links_ok = true;
  for (const auto& l : a["inter_links"]) {
    auto ref = [&](const char* key, GroupId& out) {
      if (!l.contains(key) || !l[key].is_object() || !l[key].contains("phase") ||
          !l[key].contains("local_id") || !l[key]["phase"].is_number_integer() ||
          !l[key]["local_id"].is_number_integer())
        return false;
      out = {l[key]["phase"].get<int>(), l[key]["local_id"].get<int>()};
      return true;
    };
    GroupId parent, child;
    if (!l.is_object() || !ref("parent", parent) || !ref("child", child) || !l.contains("kept") ||
        !l["kept"].is_boolean() || !l.contains("weight") || !finite_number(l["weight"])) {
      fail("malformed inter link");
      links_ok = false;
      continue;
    }
    const double w = l["weight"].get<double>();
    const std::string name = "link " + to_string(parent) + "->" + to_string(child);
    if (!lineage_of.contains(parent)) fail("dangling link endpoint " + to_string(parent));
    if (!lineage_of.contains(child)) fail("dangling link endpoint " + to_string(child));
    if (child.phase != parent.phase + 1) fail(name + ": phases not consecutive");
    if (!(w > 0.0 && w <= 1.0)) {
      fail(name + ": weight outside (0, 1]");
      links_ok = false;
      continue;
    }
    links.push_back({parent, child, w});
    kept.push_back(l["kept"].get<bool>());
  }

  if (links_ok) {
    const auto expected = hhi_keep_mask(links);
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (expected[i] != kept[i])
        fail("kept flag inconsistent with HHI filter on link " + to_string(links[i].parent) + "->" +
             to_string(links[i].child));
    }

    std::vector<InterTemporalLink> filtered;
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (kept[i] && lineage_of.contains(links[i].parent) && lineage_of.contains(links[i].child))
        filtered.push_back(links[i]);
    }
    std::vector<GroupId> all;
    for (const auto& [g, _] : lineage_of) all.push_back(g);
    const auto components = lineages(filtered, all);
    std::map<int, int> component_to_id, id_to_component;
    for (const auto& [g, comp] : components.lineage_of) {
      const int id = lineage_of.at(g);
      const auto it = component_to_id.emplace(comp, id).first;
      const auto jt = id_to_component.emplace(id, comp).first;
      if (it->second != id || jt->second != comp) {
        fail("lineage_id of group " + to_string(g) + " disagrees with kept links");
      }
    }
  }
  return findings;
}

std::vector<std::string> validate_artifact_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json a;
  try {
    a = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": ill-formed JSON: " + e.what());
  }
  return validate_artifact(a);
}

RunReport run_pipeline(const RunOptions& o) {
  OutputSet outputs;

  GraphSequence seq = stage("ingest", [&] {
    auto in = open_input(o.edges);
    return parse_sequence(in, infer_format(o));
  });

  std::optional<MetadataTable> metadata;
  RunReport report;
  if (!o.metadata.empty()) {
    stage("ingest", [&] {
      auto in = open_input(o.metadata);
      auto parsed = parse_metadata(in, seq);
      if (parsed.skipped)
        report.notices.push_back("metadata: skipped " + std::to_string(parsed.skipped) +
                                 " rows referencing unknown (phase, node)");
      metadata = std::move(parsed.table);
      return 0;
    });
  }

  std::optional<std::vector<Partition>> imported;
  if (o.config.grouping == GroupingMode::import_file) {
    imported = stage("group", [&] {
      if (o.partitions.empty()) throw std::invalid_argument("--partitions is required for import");
      auto in = open_input(o.partitions);
      return import_partition(in, seq);
    });
  }

  PipelineResult result = run_stages(seq, o.config, imported ? &*imported : nullptr,
                                     metadata ? &*metadata : nullptr);
  report.notices.insert(report.notices.end(), result.notices.begin(), result.notices.end());

  stage("export", [&] {
    report.artifact = make_artifact(seq, result, o.config);
    outputs.write(o.dump_similarity, [&](std::ostream& out) { write_similarity_csv(out, result.similarity); });
    outputs.write(o.dump_corpus, [&](std::ostream& out) { write_corpus(out, result.corpus); });
    outputs.write(o.dump_embedding, [&](std::ostream& out) { write_embedding_csv(out, result.embedding); });
    outputs.write(o.dump_layout, [&](std::ostream& out) { write_layout_csv(out, result.layout); });
    outputs.write(o.dump_links, [&](std::ostream& out) { write_links_csv(out, result.links, result.kept); });
    const std::string text = artifact_text(report.artifact);
    outputs.write(o.out, [&](std::ostream& out) { out << text; });
    return 0;
  });
  outputs.commit();
  return report;
}

}  // namespace chronoblox
