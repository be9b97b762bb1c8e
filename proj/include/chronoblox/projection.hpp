#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "chronoblox/embedding.hpp"
#include "chronoblox/metagraph.hpp"

namespace chronoblox {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// PaCMAP settings. Weight schedule: iterations [0, phase1_end) ramp the
/// mid-near weight from 1000 to 3 (near 2, far 1); [phase1_end, phase2_end)
/// use (3, 3, 1); the rest (1, 0, 1) for (near, mid-near, far).
struct PacmapConfig {
  int n_neighbors = 10;
  double mid_near_ratio = 0.5;
  double further_ratio = 2.0;
  int iterations = 450;
  int phase1_end = 100;
  int phase2_end = 200;
  double learning_rate = 1.0;
};

struct PacmapResult {
  std::vector<Point2> coords;
  /// Objective under the current schedule weights, per iteration.
  std::vector<double> loss_history;
  /// Objective under the final-phase weights, at initialisation and at the end.
  double initial_final_weight_loss = 0.0;
  double final_loss = 0.0;
  bool fell_back = false;
  std::string notice;
};

/// PaCMAP on an n x dim row-major matrix. Exact duplicate rows are collapsed
/// before fitting and receive identical output. Fewer than four distinct rows
/// fall back to a plain PCA-2D projection with a notice.
PacmapResult pacmap(std::span<const double> data, std::size_t n, std::size_t dim,
                    std::uint64_t seed, const PacmapConfig& config = {});

std::map<GroupId, Point2> pacmap_project(const GroupEmbedding& emb, std::uint64_t seed,
                                         const PacmapConfig& config = {},
                                         std::string* notice = nullptr);

/// Top-k principal-component scores of the centred rows.
std::vector<std::vector<double>> pca_scores(std::span<const double> data, std::size_t n,
                                            std::size_t dim, std::size_t k);

/// Joint 1D coordinate: centred projection on the first principal axis of the
/// 2D cloud. The sign makes the first group (in GroupId order) with a
/// non-negligible coordinate positive. Coincident points map to zero.
std::map<GroupId, double> pca_axis(const std::map<GroupId, Point2>& coords);

struct GroupLayout {
  std::map<GroupId, Point2> coords2d;
  std::map<GroupId, double> alluvial1d;
};

/// Member-count weighted mean of each phase's group coordinates.
std::vector<Point2> phase_centroids(const GroupLayout& layout, const MetaGraphSequence& seq);

/// `phase,group,x,y,alluvial`
void write_layout_csv(std::ostream& out, const GroupLayout& layout);

}  // namespace chronoblox
