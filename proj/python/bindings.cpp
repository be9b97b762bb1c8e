#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "chronoblox/pipeline.hpp"
#include "chronoblox/synthgen.hpp"

namespace py = pybind11;
using namespace chronoblox;

namespace {

GraphSequence sequence_from_text(const std::string& text, const std::string& format) {
  std::istringstream in(text);
  return parse_sequence(in, edge_format_from_name(format));
}

py::dict sequence_summary(const GraphSequence& seq) {
  py::list phases;
  for (const auto& p : seq.phases()) {
    py::dict d;
    d["label"] = p.phase_label;
    d["nodes"] = p.nodes.size();
    d["edges"] = p.edges.size();
    d["total_weight"] = p.total_weight();
    phases.append(d);
  }
  py::dict out;
  out["n_phases"] = seq.size();
  out["phases"] = phases;
  return out;
}

std::string run_text(const std::string& edges, const std::string& format,
                     const std::optional<std::string>& partitions,
                     const std::optional<std::string>& metadata, const std::string& config_json) {
  PipelineConfig config;
  if (!config_json.empty()) apply_config_json(config, nlohmann::json::parse(config_json));
  if (partitions) config.grouping = GroupingMode::import_file;

  const GraphSequence seq = sequence_from_text(edges, format);
  std::optional<std::vector<Partition>> parts;
  if (partitions) {
    std::istringstream in(*partitions);
    parts = import_partition(in, seq);
  }
  std::optional<MetadataTable> table;
  if (metadata) {
    std::istringstream in(*metadata);
    table = parse_metadata(in, seq).table;
  }
  PipelineResult result;
  {
    py::gil_scoped_release release;
    result = run_stages(seq, config, parts ? &*parts : nullptr, table ? &*table : nullptr);
  }
  return make_artifact(seq, result, config).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Chronophotographic layout of graph sequences";

  m.def("parse_sequence",
        [](const std::string& text, const std::string& format) {
          return sequence_summary(sequence_from_text(text, format));
        },
        py::arg("text"), py::arg("format") = "csv");

  m.def("louvain",
        [](const std::string& text, int phase, std::uint64_t seed) {
          const auto seq = sequence_from_text(text, "csv");
          const auto part = louvain(seq.phase(phase), seed);
          const auto& p = seq.phase(phase);
          py::dict groups;
          for (std::size_t i = 0; i < p.nodes.size(); ++i) groups[py::str(seq.name(p.nodes[i]))] = part.assignment[i];
          return py::make_tuple(groups, modularity(p, part.assignment));
        },
        py::arg("edges_csv"), py::arg("phase"), py::arg("seed") = 0,
        "Louvain grouping of one phase; returns ({node: group}, modularity).");

  m.def("jaccard",
        [](std::vector<NodeIndex> a, std::vector<NodeIndex> b) {
          std::sort(a.begin(), a.end());
          a.erase(std::unique(a.begin(), a.end()), a.end());
          std::sort(b.begin(), b.end());
          b.erase(std::unique(b.begin(), b.end()), b.end());
          return jaccard(a, b);
        });

  m.def("hhi_keep_mask",
        [](const std::vector<std::tuple<int, int, int, int, double>>& rows) {
          std::vector<InterTemporalLink> links;
          for (const auto& [pp, pg, cp, cg, w] : rows) links.push_back({{pp, pg}, {cp, cg}, w});
          return hhi_keep_mask(links);
        },
        py::arg("links"), "links: (parent_phase, parent_group, child_phase, child_group, weight)");

  m.def("pca_axis", [](const std::vector<std::pair<double, double>>& points) {
    std::map<GroupId, Point2> coords;
    for (std::size_t i = 0; i < points.size(); ++i)
      coords[{0, static_cast<int>(i)}] = {points[i].first, points[i].second};
    std::vector<double> out;
    for (const auto& [_, v] : pca_axis(coords)) out.push_back(v);
    return out;
  });

  m.def("pacmap",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> x, std::uint64_t seed) {
          if (x.ndim() != 2) throw std::invalid_argument("expected a 2D array");
          const auto n = static_cast<std::size_t>(x.shape(0));
          const auto dim = static_cast<std::size_t>(x.shape(1));
          std::span<const double> data(x.data(), n * dim);
          PacmapResult r;
          {
            py::gil_scoped_release release;
            r = chronoblox::pacmap(data, n, dim, seed);
          }
          py::array_t<double> out({static_cast<py::ssize_t>(n), py::ssize_t{2}});
          auto view = out.mutable_unchecked<2>();
          for (std::size_t i = 0; i < n; ++i) {
            view(i, 0) = r.coords[i].x;
            view(i, 1) = r.coords[i].y;
          }
          return out;
        },
        py::arg("data"), py::arg("seed") = 0);

  m.def("generate_scenario",
        [](std::uint64_t seed, double scale) {
          ScenarioParams params;
          params.scale = scale;
          const auto gen = generate(default_scenario(seed, params));
          std::ostringstream edges, parts;
          write_sequence_csv(edges, gen.sequence);
          write_partition_csv(parts, gen.sequence, gen.partitions);
          return py::make_tuple(edges.str(), parts.str());
        },
        py::arg("seed") = 0, py::arg("scale") = 1.0,
        "Returns (edges_csv, partitions_csv) for the built-in scenario.");

  m.def("run", &run_text, py::arg("edges"), py::arg("format") = "csv",
        py::arg("partitions") = std::nullopt, py::arg("metadata") = std::nullopt,
        py::arg("config") = "", "Runs the pipeline on in-memory inputs; returns artifact JSON text.");

  m.def("validate_artifact",
        [](const std::string& text) { return validate_artifact(nlohmann::json::parse(text)); });
}
