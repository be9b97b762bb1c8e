// chronoblox command line: generate | run | validate

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chronoblox/pipeline.hpp"
#include "chronoblox/synthgen.hpp"

namespace {

using namespace chronoblox;

int cmd_generate(const std::string& scenario_path, std::uint64_t seed, double scale,
                 const std::string& edges_out, const std::string& partitions_out,
                 const std::string& scenario_out) {
  Scenario scn;
  if (!scenario_path.empty()) {
    std::ifstream in(scenario_path);
    if (!in) throw std::runtime_error("cannot open " + scenario_path);
    scn = scenario_from_json(nlohmann::json::parse(in));
    scn.seed = seed;
  } else {
    ScenarioParams params;
    params.scale = scale;
    scn = default_scenario(seed, params);
  }
  const auto gen = generate(scn);

  std::ofstream edges(edges_out);
  if (!edges) throw std::runtime_error("cannot write " + edges_out);
  write_sequence_csv(edges, gen.sequence);
  std::ofstream parts(partitions_out);
  if (!parts) throw std::runtime_error("cannot write " + partitions_out);
  write_partition_csv(parts, gen.sequence, gen.partitions);
  if (!scenario_out.empty()) {
    std::ofstream s(scenario_out);
    s << scenario_to_json(scn).dump(2) << '\n';
  }

  for (const auto& p : gen.sequence.phases()) {
    std::cerr << "phase " << p.phase_label << ": " << p.nodes.size() << " nodes, " << p.edges.size()
              << " edges, " << gen.partitions[p.phase_index].group_count() << " groups\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chronophotographic layout of graph sequences"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample the synthetic scenario sequence");
  std::string gen_scenario, gen_edges = "edges.csv", gen_parts = "partitions.csv", gen_scn_out;
  std::uint64_t gen_seed = 0;
  double gen_scale = 1.0;
  gen->add_option("--scenario", gen_scenario, "Scenario JSON (default: built-in scenario)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--scale", gen_scale, "Size multiplier for the built-in scenario")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out-edges", gen_edges, "Edge CSV output");
  gen->add_option("--out-partitions", gen_parts, "Ground-truth partition CSV output");
  gen->add_option("--out-scenario", gen_scn_out, "Write the scenario JSON used");

  // run
  auto* run = app.add_subcommand("run", "Run the layout pipeline and write the artifact");
  RunOptions opts;
  std::string config_path, grouping, format;
  std::uint64_t seed = 0;
  int dims = 64, threads = 0;
  run->add_option("--edges", opts.edges, "Edge list (CSV or JSONL)")->required();
  run->add_option("--format", format, "Edge format: csv|jsonl (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_option("--metadata", opts.metadata, "Metadata CSV phase,node,label");
  run->add_option("--partitions", opts.partitions, "Partition CSV phase,node,group");
  auto* grouping_opt = run->add_option("--grouping", grouping, "louvain|import")
                           ->check(CLI::IsMember({"louvain", "import"}));
  auto* seed_opt = run->add_option("--seed", seed, "Random seed");
  auto* dims_opt = run->add_option("--dims", dims, "Embedding dimension")->check(CLI::PositiveNumber);
  run->add_option("--out", opts.out, "Artifact JSON path");
  auto* det_flag = run->add_flag("--deterministic", "Single-threaded, reproducible training");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads for training");
  run->add_option("--config", config_path, "JSON config file (flags take precedence)");
  run->add_option("--dump-similarity", opts.dump_similarity, "Similarity CSV dump");
  run->add_option("--dump-corpus", opts.dump_corpus, "Random-walk corpus dump");
  run->add_option("--dump-embedding", opts.dump_embedding, "Embedding CSV dump");
  run->add_option("--dump-coords", opts.dump_layout, "Coordinates CSV dump");
  run->add_option("--dump-links", opts.dump_links, "Inter-temporal links CSV dump");

  // validate
  auto* val = app.add_subcommand("validate", "Check an artifact's invariants");
  std::string artifact_path;
  val->add_option("artifact", artifact_path, "Artifact JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      return cmd_generate(gen_scenario, gen_seed, gen_scale, gen_edges, gen_parts, gen_scn_out);
    }
    if (*run) {
      // defaults < config file < flags
      opts.config.deterministic = false;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open " + config_path);
        apply_config_json(opts.config, nlohmann::json::parse(in));
      }
      if (grouping_opt->count()) opts.config.grouping = grouping_mode_from_name(grouping);
      if (seed_opt->count()) opts.config.seed = seed;
      if (dims_opt->count()) opts.config.skipgram.dim = dims;
      if (det_flag->count()) opts.config.deterministic = true;
      if (threads_opt->count()) opts.config.threads = threads;
      if (!format.empty()) opts.edge_format = format;

      const auto report = run_pipeline(opts);
      for (const auto& n : report.notices) std::cerr << "notice: " << n << '\n';
      std::cerr << "wrote " << opts.out << " (" << report.artifact["groups"].size() << " groups, "
                << report.artifact["inter_links"].size() << " inter-temporal links)\n";
      return 0;
    }
    if (*val) {
      const auto findings = validate_artifact_file(artifact_path);
      for (const auto& f : findings) std::cout << f << '\n';
      std::cout << findings.size() << " finding(s)\n";
      return findings.empty() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
