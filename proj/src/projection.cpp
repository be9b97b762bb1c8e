#include "chronoblox/projection.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "chronoblox/random.hpp"

namespace chronoblox {

namespace {

using Pair = std::pair<int, int>;

struct Weights {
  double near = 0.0;
  double mid = 0.0;
  double far = 0.0;
};

Weights schedule(int iter, const PacmapConfig& c) {
  if (iter < c.phase1_end) {
    const double frac = static_cast<double>(iter) / c.phase1_end;
    return {2.0, (1.0 - frac) * 1000.0 + frac * 3.0, 1.0};
  }
  if (iter < c.phase2_end) return {3.0, 3.0, 1.0};
  return {1.0, 0.0, 1.0};
}

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

struct PairSets {
  std::vector<Pair> near, mid, far;
};

PairSets build_pairs(const std::vector<double>& x, std::size_t n, std::size_t dim,
                     const PacmapConfig& config, Rng& rng) {
  const auto row = [&](std::size_t i) { return x.data() + i * dim; };
  const std::size_t n_near = std::min<std::size_t>(config.n_neighbors, n - 1);
  const std::size_t n_extra = std::min<std::size_t>(n_near + 50, n - 1);
  const auto n_mid = static_cast<std::size_t>(config.n_neighbors * config.mid_near_ratio);
  const auto n_far_wanted = static_cast<std::size_t>(config.n_neighbors * config.further_ratio);

  // Exact k-NN by full scan.
  std::vector<std::vector<std::pair<double, int>>> knn(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> all;
    all.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) all.emplace_back(std::sqrt(squared_distance(row(i), row(j), dim)), static_cast<int>(j));
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_extra), all.end());
    all.resize(n_extra);
    knn[i] = std::move(all);
  }

  // Local scale: mean distance to the 4th..6th neighbours.
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min<std::size_t>(3, knn[i].size() - 1);
    const std::size_t hi = std::min<std::size_t>(6, knn[i].size());
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += knn[i][k].first;
    sigma[i] = std::max(s / static_cast<double>(hi - lo), 1e-10);
  }

  PairSets pairs;
  std::vector<std::vector<int>> neighbours(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> scaled;
    scaled.reserve(knn[i].size());
    for (const auto& [d, j] : knn[i]) scaled.emplace_back(d * d / sigma[i] / sigma[j], j);
    std::stable_sort(scaled.begin(), scaled.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < n_near; ++k) {
      pairs.near.emplace_back(static_cast<int>(i), scaled[k].second);
      neighbours[i].push_back(scaled[k].second);
    }
    std::sort(neighbours[i].begin(), neighbours[i].end());
  }

  // Mid-near: second closest of six random distinct points, repeated.
  const std::size_t sample = std::min<std::size_t>(6, n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> picked;
    for (std::size_t m = 0; m < n_mid; ++m) {
      for (int attempt = 0; attempt < 32; ++attempt) {
        std::vector<std::pair<double, int>> cand;
        while (cand.size() < sample) {
          const int j = static_cast<int>(rng.below(n));
          if (j == static_cast<int>(i)) continue;
          if (std::any_of(cand.begin(), cand.end(), [j](const auto& c) { return c.second == j; }))
            continue;
          cand.emplace_back(squared_distance(row(i), row(j), dim), j);
        }
        std::sort(cand.begin(), cand.end());
        const int j = cand[std::min<std::size_t>(1, cand.size() - 1)].second;
        if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
        picked.push_back(j);
        pairs.mid.emplace_back(static_cast<int>(i), j);
        break;
      }
    }
  }

  // Further pairs: random non-neighbours.
  const std::size_t eligible = n - 1 - n_near;
  const std::size_t n_far = std::min(n_far_wanted, eligible);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> picked;
    while (picked.size() < n_far) {
      const int j = static_cast<int>(rng.below(n));
      if (j == static_cast<int>(i)) continue;
      if (std::binary_search(neighbours[i].begin(), neighbours[i].end(), j)) continue;
      if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
      picked.push_back(j);
      pairs.far.emplace_back(static_cast<int>(i), j);
    }
  }
  return pairs;
}

// Returns the objective; accumulates the gradient when `grad` is non-null.
double objective(const std::vector<double>& y, const PairSets& pairs, const Weights& w,
                 std::vector<double>* grad) {
  double loss = 0.0;
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
  auto visit = [&](const std::vector<Pair>& set, double weight, auto&& term) {
    if (weight == 0.0) return;
    for (const auto& [i, j] : set) {
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      const double d = 1.0 + dx * dx + dy * dy;
      const auto [value, coef] = term(d);
      loss += weight * value;
      if (grad && weight != 0.0) {
        const double g = weight * coef;
        (*grad)[2 * i] += g * dx;
        (*grad)[2 * i + 1] += g * dy;
        (*grad)[2 * j] -= g * dx;
        (*grad)[2 * j + 1] -= g * dy;
      }
    }
  };
  // coef is d(value)/d(d) * 2, the factor multiplying (y_i - y_j).
  visit(pairs.near, w.near, [](double d) {
    return std::pair(d / (10.0 + d), 20.0 / ((10.0 + d) * (10.0 + d)));
  });
  visit(pairs.mid, w.mid, [](double d) {
    return std::pair(d / (10000.0 + d), 20000.0 / ((10000.0 + d) * (10000.0 + d)));
  });
  visit(pairs.far, w.far, [](double d) {
    return std::pair(1.0 / (1.0 + d), -2.0 / ((1.0 + d) * (1.0 + d)));
  });
  return loss;
}

std::vector<double> pca_init(const std::vector<double>& x, std::size_t n, std::size_t dim) {
  const auto scores = pca_scores(x, n, dim, 2);
  std::vector<double> y(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    y[2 * i] = scores[0][i];
    y[2 * i + 1] = scores[1][i];
  }
  return y;
}

}  // namespace

std::vector<std::vector<double>> pca_scores(std::span<const double> data, std::size_t n,
                                            std::size_t dim, std::size_t k) {
  if (data.size() != n * dim) throw std::invalid_argument("pca_scores: shape mismatch");
  Eigen::MatrixXd x(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) x(i, j) = data[i * dim + j];
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(std::max<std::size_t>(n, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

  std::vector<std::vector<double>> scores(k, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < k && c < dim; ++c) {
    // Eigen sorts eigenvalues ascending.
    Eigen::VectorXd axis = solver.eigenvectors().col(static_cast<Eigen::Index>(dim - 1 - c));
    Eigen::VectorXd s = x * axis;
    Eigen::Index arg = 0;
    s.cwiseAbs().maxCoeff(&arg);
    if (s.size() > 0 && s(arg) < 0) s = -s;
    for (std::size_t i = 0; i < n; ++i) scores[c][i] = s(static_cast<Eigen::Index>(i));
  }
  return scores;
}

PacmapResult pacmap(std::span<const double> data, std::size_t n, std::size_t dim,
                    std::uint64_t seed, const PacmapConfig& config) {
  if (data.size() != n * dim) throw std::invalid_argument("pacmap: shape mismatch");
  if (config.n_neighbors < 1 || config.iterations < 1)
    throw std::invalid_argument("pacmap: invalid configuration");
  PacmapResult result;
  result.coords.resize(n);
  if (n == 0) return result;

  // Collapse exact duplicates.
  std::map<std::vector<double>, int> unique_index;
  std::vector<int> rep(n);
  std::vector<double> x;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(data.begin() + static_cast<std::ptrdiff_t>(i * dim),
                          data.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    auto [it, inserted] = unique_index.try_emplace(r, static_cast<int>(unique_index.size()));
    if (inserted) x.insert(x.end(), r.begin(), r.end());
    rep[i] = it->second;
  }
  const std::size_t m = unique_index.size();

  // Scale to [0, 1] by the global range, then centre each column.
  if (!x.empty()) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double min = *lo;
    const double range = *hi - *lo;
    for (auto& v : x) v = range > 0.0 ? (v - min) / range : 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < m; ++i) mean += x[i * dim + j];
      mean /= static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) x[i * dim + j] -= mean;
    }
  }

  std::vector<double> y;
  if (m < 4) {
    result.fell_back = true;
    result.notice = "pacmap: fewer than 4 distinct points, using PCA-2D";
    y = pca_init(x, m, dim);
  } else {
    Rng rng(derive_seed(seed, 0x7061636dULL));
    const PairSets pairs = build_pairs(x, m, dim, config, rng);
    y = pca_init(x, m, dim);
    for (auto& v : y) v *= 0.01;

    const Weights final_weights = schedule(config.iterations, config);
    result.initial_final_weight_loss = objective(y, pairs, final_weights, nullptr);

    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    std::vector<double> grad(y.size()), m1(y.size(), 0.0), m2(y.size(), 0.0);
    result.loss_history.reserve(config.iterations);
    for (int iter = 0; iter < config.iterations; ++iter) {
      const Weights w = schedule(iter, config);
      result.loss_history.push_back(objective(y, pairs, w, &grad));
      const double t = iter + 1;
      const double lr_t =
          config.learning_rate * std::sqrt(1.0 - std::pow(beta2, t)) / (1.0 - std::pow(beta1, t));
      for (std::size_t k = 0; k < y.size(); ++k) {
        m1[k] += (1.0 - beta1) * (grad[k] - m1[k]);
        m2[k] += (1.0 - beta2) * (grad[k] * grad[k] - m2[k]);
        y[k] -= lr_t * m1[k] / (std::sqrt(m2[k]) + 1e-7);
      }
    }
    result.final_loss = objective(y, pairs, final_weights, nullptr);
  }

  for (std::size_t i = 0; i < n; ++i) result.coords[i] = {y[2 * rep[i]], y[2 * rep[i] + 1]};
  return result;
}

std::map<GroupId, Point2> pacmap_project(const GroupEmbedding& emb, std::uint64_t seed,
                                         const PacmapConfig& config, std::string* notice) {
  const auto result = pacmap(emb.data, emb.size(), static_cast<std::size_t>(emb.dim), seed, config);
  if (notice) *notice = result.notice;
  std::map<GroupId, Point2> out;
  for (std::size_t i = 0; i < emb.size(); ++i) out[emb.groups[i]] = result.coords[i];
  return out;
}

std::map<GroupId, double> pca_axis(const std::map<GroupId, Point2>& coords) {
  if (coords.size() < 2) throw std::invalid_argument("pca_axis: need at least 2 points");
  const double n = static_cast<double>(coords.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [_, p] : coords) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double a = 0.0, b = 0.0, c = 0.0;
  for (const auto& [_, p] : coords) {
    const double dx = p.x - mx, dy = p.y - my;
    a += dx * dx;
    b += dx * dy;
    c += dy * dy;
  }
  a /= n;
  b /= n;
  c /= n;

  std::map<GroupId, double> out;
  if (a == 0.0 && b == 0.0 && c == 0.0) {
    for (const auto& [g, _] : coords) out[g] = 0.0;
    return out;
  }

  // Largest eigenpair of [[a, b], [b, c]].
  const double lambda = 0.5 * (a + c) + std::hypot(0.5 * (a - c), b);
  double vx, vy;
  if (b == 0.0) {
    vx = a >= c ? 1.0 : 0.0;
    vy = a >= c ? 0.0 : 1.0;
  } else {
    const double ux = lambda - c, uy = b;  // both are eigenvectors; keep the
    const double wx = b, wy = lambda - a;  // better-conditioned one
    if (std::hypot(ux, uy) >= std::hypot(wx, wy)) {
      vx = ux;
      vy = uy;
    } else {
      vx = wx;
      vy = wy;
    }
    const double norm = std::hypot(vx, vy);
    vx /= norm;
    vy /= norm;
  }

  for (const auto& [g, p] : coords) out[g] = (p.x - mx) * vx + (p.y - my) * vy;

  const double negligible = 1e-12 * std::sqrt(lambda);
  for (const auto& [g, v] : out) {
    if (std::abs(v) > negligible) {
      if (v < 0.0)
        for (auto& [_, w] : out) w = -w;
      break;
    }
  }
  return out;
}

std::vector<Point2> phase_centroids(const GroupLayout& layout, const MetaGraphSequence& seq) {
  std::vector<Point2> out;
  out.reserve(seq.metas.size());
  for (const auto& meta : seq.metas) {
    double sx = 0.0, sy = 0.0, total = 0.0;
    for (int b = 0; b < meta.group_count(); ++b) {
      const auto it = layout.coords2d.find(meta.group(b));
      if (it == layout.coords2d.end())
        throw std::invalid_argument("phase_centroids: layout misses group " + to_string(meta.group(b)));
      const double w = static_cast<double>(meta.members[b].size());
      sx += w * it->second.x;
      sy += w * it->second.y;
      total += w;
    }
    out.push_back(total > 0.0 ? Point2{sx / total, sy / total} : Point2{});
  }
  return out;
}

void write_layout_csv(std::ostream& out, const GroupLayout& layout) {
  out << "phase,group,x,y,alluvial\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& [g, p] : layout.coords2d) {
    const auto it = layout.alluvial1d.find(g);
    out << g.phase << ',' << g.local << ',' << p.x << ',' << p.y << ','
        << (it == layout.alluvial1d.end() ? 0.0 : it->second) << '\n';
  }
}

}  // namespace chronoblox
