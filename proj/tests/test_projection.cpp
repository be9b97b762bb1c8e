#include <sstream>

#include "chronoblox/projection.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chronoblox;

TEST_SUITE("projection") {

TEST_CASE("three separated gaussians stay separated") {
  Rng rng(1);
  std::vector<int> labels;
  const auto x = oracle::three_gaussians(40, 64, rng, labels);
  const auto r = pacmap(x, 120, 64, 1);
  CHECK_FALSE(r.fell_back);
  CHECK(r.loss_history.size() == 450);
  CHECK(r.final_loss < r.initial_final_weight_loss);
  CHECK(oracle::silhouette(r.coords, labels) > 0.5);
}

TEST_CASE("same input and seed give identical coordinates") {
  Rng rng(2);
  std::vector<int> labels;
  const auto x = oracle::three_gaussians(10, 8, rng, labels);
  const auto a = pacmap(x, 30, 8, 5);
  const auto b = pacmap(x, 30, 8, 5);
  CHECK(a.coords == b.coords);
  CHECK(pacmap(x, 30, 8, 6).coords != a.coords);
}

TEST_CASE("duplicate rows land on the same point") {
  Rng rng(3);
  std::vector<int> labels;
  auto x = oracle::three_gaussians(8, 6, rng, labels);
  const std::vector<double> first(x.begin(), x.begin() + 6);
  x.insert(x.end(), first.begin(), first.end());
  x.insert(x.end(), first.begin(), first.end());
  const auto r = pacmap(x, 26, 6, 1);
  for (std::size_t i : {24u, 25u}) {
    CHECK(std::abs(r.coords[i].x - r.coords[0].x) < 1e-6);
    CHECK(std::abs(r.coords[i].y - r.coords[0].y) < 1e-6);
  }
}

TEST_CASE("fewer than four distinct points fall back to pca") {
  const std::vector<double> x{0, 0, 1, 0, 0, 1, 1, 0};
  const auto r = pacmap(x, 4, 2, 1);
  CHECK(r.fell_back);
  CHECK(!r.notice.empty());
  CHECK(r.coords[1] == r.coords[3]);
  for (const auto& p : r.coords) CHECK(std::isfinite(p.x));
  CHECK_THROWS(pacmap(x, 3, 2, 1));
}

TEST_CASE("pca_axis matches the eigensolver oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<GroupId, Point2> pts;
    const int n = 2 + static_cast<int>(rng.below(40));
    const double sx = rng.uniform(0.1, 5.0), sy = rng.uniform(0.1, 5.0), rho = rng.uniform(-0.9, 0.9);
    for (int i = 0; i < n; ++i) {
      const double u = rng.normal(), v = rng.normal();
      pts[{i / 3, i % 3}] = {sx * u + 10.0, sy * (rho * u + std::sqrt(1 - rho * rho) * v) - 4.0};
    }
    const auto got = pca_axis(pts);
    const auto want = oracle::pca_axis(pts);
    double mean = 0.0;
    for (const auto& [g, v] : got) {
      CHECK(v == doctest::Approx(want.at(g)).epsilon(1e-9).scale(1.0));
      mean += v;
    }
    CHECK(std::abs(mean / n) < 1e-9);
  }
}

TEST_CASE("pca_axis on a line keeps order and distance ratios") {
  std::map<GroupId, Point2> pts;
  const std::vector<double> xs{-2.0, 0.5, 1.0, 4.0};
  for (std::size_t i = 0; i < xs.size(); ++i) pts[{static_cast<int>(i), 0}] = {xs[i], 2.0 * xs[i]};
  const auto out = pca_axis(pts);
  std::vector<double> v;
  for (const auto& [_, x] : out) v.push_back(x);
  // The first group is made positive, which reverses the order along x.
  CHECK(v[0] > 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      CHECK(std::abs(v[i] - v[j]) == doctest::Approx(std::sqrt(5.0) * std::abs(xs[i] - xs[j])).epsilon(1e-12));
}

TEST_CASE("pca_axis variance equals the top covariance eigenvalue and ignores rotation") {
  Rng rng(6);
  std::map<GroupId, Point2> pts, rotated;
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (int i = 0; i < 25; ++i) {
    const Point2 p{rng.normal() * 3.0, rng.normal()};
    pts[{i, 0}] = p;
    rotated[{i, 0}] = {c * p.x - s * p.y + 1.0, s * p.x + c * p.y - 2.0};
  }
  const auto a = pca_axis(pts);
  const auto b = pca_axis(rotated);
  double var = 0.0;
  for (const auto& [g, v] : a) {
    CHECK(std::abs(std::abs(v) - std::abs(b.at(g))) < 1e-9);
    var += v * v;
  }
  var /= 25.0;
  double mx = 0, my = 0;
  for (const auto& [_, p] : pts) {
    mx += p.x / 25.0;
    my += p.y / 25.0;
  }
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& [_, p] : pts) {
    const Eigen::Vector2d d(p.x - mx, p.y - my);
    cov += d * d.transpose() / 25.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  CHECK(var == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-9));
}

TEST_CASE("coincident points map to zero") {
  std::map<GroupId, Point2> pts{{{0, 0}, {1, 1}}, {{1, 0}, {1, 1}}, {{2, 0}, {1, 1}}};
  for (const auto& [_, v] : pca_axis(pts)) CHECK(v == 0.0);
  CHECK_THROWS(pca_axis({{{0, 0}, {1, 1}}}));
}

TEST_CASE("phase centroids weight groups by member count") {
  MetaGraphSequence seq;
  MetaGraph m0;
  m0.phase_index = 0;
  m0.members = {{1, 2, 3}, {4}};
  MetaGraph m1;
  m1.phase_index = 1;
  m1.members = {{1, 2}, {3, 4}};
  MetaGraph m2;
  m2.phase_index = 2;
  m2.members = {{7}};
  seq.metas = {m0, m1, m2};
  GroupLayout layout;
  layout.coords2d = {{{0, 0}, {0, 0}}, {{0, 1}, {4, 0}}, {{1, 0}, {0, 0}}, {{1, 1}, {2, 0}}, {{2, 0}, {5, -3}}};
  const auto c = phase_centroids(layout, seq);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == Point2{1.0, 0.0});
  CHECK(c[1] == Point2{1.0, 0.0});
  CHECK(c[2] == Point2{5.0, -3.0});
  layout.coords2d.erase({2, 0});
  CHECK_THROWS(phase_centroids(layout, seq));
}

TEST_CASE("layout dump") {
  GroupLayout layout;
  layout.coords2d = {{{0, 0}, {1, 2}}};
  layout.alluvial1d = {{{0, 0}, 0.5}};
  std::ostringstream out;
  write_layout_csv(out, layout);
  CHECK(out.str() == "phase,group,x,y,alluvial\n0,0,1,2,0.5\n");
}

}  // TEST_SUITE
