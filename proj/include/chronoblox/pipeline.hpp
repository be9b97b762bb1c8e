#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chronoblox/embedding.hpp"
#include "chronoblox/graph_io.hpp"
#include "chronoblox/grouping.hpp"
#include "chronoblox/lineage.hpp"
#include "chronoblox/metagraph.hpp"
#include "chronoblox/projection.hpp"
#include "chronoblox/similarity.hpp"

namespace chronoblox {

enum class GroupingMode { louvain, import_file };

GroupingMode grouping_mode_from_name(const std::string& name);
std::string grouping_mode_name(GroupingMode mode);

struct PipelineConfig {
  GroupingMode grouping = GroupingMode::louvain;
  std::uint64_t seed = 7;
  /// Forces single-threaded skip-gram so the artifact is reproducible.
  bool deterministic = true;
  int threads = 0;
  WalkConfig walks;
  SkipGramConfig skipgram;
  PacmapConfig pacmap;
};

nlohmann::json config_to_json(const PipelineConfig& config);
/// Overlays the keys present in `j` onto `config`.
void apply_config_json(PipelineConfig& config, const nlohmann::json& j);

/// Error raised by a pipeline stage; `stage()` names the failing stage.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineResult {
  std::vector<Partition> partitions;
  MetaGraphSequence metas;
  SimilarityMatrix similarity;
  WalkCorpus corpus;
  GroupEmbedding embedding;
  GroupLayout layout;
  std::vector<InterTemporalLink> links;
  std::vector<bool> kept;
  LineageGraph lineage;
  std::vector<std::string> notices;
};

/// group -> metagraph -> similarity -> embed -> project -> lineage.
/// `imported` is required when grouping is import_file.
PipelineResult run_stages(const GraphSequence& seq, const PipelineConfig& config,
                          const std::vector<Partition>* imported = nullptr,
                          const MetadataTable* metadata = nullptr);

/// Viewer artifact (schema_version 1).
nlohmann::json make_artifact(const GraphSequence& seq, const PipelineResult& result,
                             const PipelineConfig& config);

/// Serialised artifact text as written to disk.
std::string artifact_text(const nlohmann::json& artifact);

/// Invariant violations, one message each; empty when the artifact is sound.
std::vector<std::string> validate_artifact(const nlohmann::json& artifact);

/// Reads and checks a file; throws std::runtime_error when it is unreadable
/// or not JSON.
std::vector<std::string> validate_artifact_file(const std::string& path);

struct RunOptions {
  std::string edges;
  std::optional<std::string> edge_format;  // inferred from extension when empty
  std::string metadata;
  std::string partitions;
  std::string out = "artifact.json";
  std::string dump_similarity;
  std::string dump_corpus;
  std::string dump_embedding;
  std::string dump_layout;
  std::string dump_links;
  PipelineConfig config;
};

struct RunReport {
  nlohmann::json artifact;
  std::vector<std::string> notices;
};

/// Reads the inputs, runs every stage and writes the artifact and requested
/// dumps. Errors are rethrown as PipelineError; files written by the failed
/// run are removed.
RunReport run_pipeline(const RunOptions& options);

}  // namespace chronoblox
