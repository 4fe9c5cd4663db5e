#include <sstream>

#include <gtest/gtest.h>

#include "qwalk/heatmap.hpp"

namespace qwalk {
namespace {

Heatmap analytic(HeatmapKind kind, std::size_t grid, int m = 1) {
  HeatmapParams params;
  params.grid = grid;
  params.m = m;
  return compute_heatmap(kind, params);
}

TEST(Heatmap, PiLeftRange) {
  const auto map = analytic(HeatmapKind::pi_left, 201);
  ASSERT_EQ(map.points.size(), 201u * 201u);
  const auto [lo, hi] = map.value_range();
  EXPECT_GE(lo, 1.0 - sqrt2 / 2.0 - 1e-12);
  EXPECT_LE(hi, sqrt2 / 2.0 + 1e-12);
  EXPECT_GE(lo, 0.29);
  EXPECT_LE(hi, 0.71);
  for (const auto& p : map.points) ASSERT_GE(zone_index(map.zones, p.value), 0);
}

TEST(Heatmap, PiRightMirrorsPiLeft) {
  const auto l = analytic(HeatmapKind::pi_left, 21);
  const auto r = analytic(HeatmapKind::pi_right, 21);
  for (std::size_t i = 0; i < l.points.size(); ++i) ASSERT_NEAR(l.points[i].value + r.points[i].value, 1.0, 1e-15);
}

TEST(Heatmap, SecondMeasurementRange) {
  const auto map = analytic(HeatmapKind::p2t, 201);
  const auto [lo, hi] = map.value_range();
  EXPECT_GE(lo, 0.439);
  EXPECT_LE(hi, 0.561);
  EXPECT_LT(lo, 0.440);
  EXPECT_GT(hi, 0.560);
  EXPECT_EQ(map.zones.size(), 3u);
}

TEST(Heatmap, ThreeMeasurementRange) {
  const auto map = analytic(HeatmapKind::sigma_b, 201, 3);
  const auto [lo, hi] = map.value_range();
  EXPECT_GE(lo, 0.45 - 0.005);
  EXPECT_LE(hi, 0.52 + 0.005);
}

TEST(Heatmap, GridIncludesEndpointsAlphaMajor) {
  const auto map = analytic(HeatmapKind::sigma_a, 3);
  ASSERT_EQ(map.points.size(), 9u);
  EXPECT_EQ(map.points[0].alpha, 0.0);
  EXPECT_EQ(map.points[0].beta, 0.0);
  EXPECT_EQ(map.points[1].alpha, 0.0);
  EXPECT_DOUBLE_EQ(map.points[1].beta, pi);
  EXPECT_EQ(map.points[2].beta, 2.0 * pi);
  EXPECT_EQ(map.points[8].alpha, pi);
  EXPECT_EQ(map.points[4].value, win_density({pi / 2.0, pi}, 1).alice);
}

TEST(Heatmap, ZonesAndNames) {
  EXPECT_EQ(zones_for(HeatmapKind::pi_left).size(), 7u);
  EXPECT_EQ(zones_for(HeatmapKind::pi_left).front().lo, 0.29);
  EXPECT_EQ(zones_for(HeatmapKind::pi_left).back().hi, 0.71);
  EXPECT_EQ(zones_for(HeatmapKind::sigma_a, 2).size(), 3u);
  EXPECT_EQ(zones_for(HeatmapKind::halfline).front().lo, 0.738);
  EXPECT_EQ(zones_for(HeatmapKind::halfline).back().hi, 0.797);
  EXPECT_EQ(zone_index(zones_for(HeatmapKind::pi_left), 0.1), -1);
  EXPECT_EQ(zone_index(zones_for(HeatmapKind::pi_left), 0.7), 6);
  for (const char* name : {"pi-left", "pi-right", "p2T", "halfline", "sigma-a", "sigma-b"}) {
    EXPECT_STREQ(to_string(parse_heatmap_kind(name)), name);
  }
  EXPECT_THROW(parse_heatmap_kind("pi_left"), std::invalid_argument);
  EXPECT_THROW(analytic(HeatmapKind::pi_left, 1), std::invalid_argument);
  EXPECT_THROW(analytic(HeatmapKind::sigma_a, 5, 0), std::invalid_argument);
}

TEST(Heatmap, CsvAndSidecar) {
  const auto map = analytic(HeatmapKind::pi_left, 4);
  std::ostringstream os;
  write_csv(os, map);
  std::istringstream lines(os.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "alpha,beta,value");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 16u);

  const auto side = sidecar_json(map);
  EXPECT_EQ(side["which"], "pi-left");
  EXPECT_EQ(side["zones"].size(), 7u);
  EXPECT_EQ(side["params"]["grid"], 4);
  EXPECT_EQ(to_json(map)["points"].size(), 16u);
}

TEST(Heatmap, HalfLineSmallRun) {
  HeatmapParams params;
  params.grid = 2;
  params.ensemble.steps = 300;
  params.ensemble.trajectories = 4;
  const auto map = compute_heatmap(HeatmapKind::halfline, params);
  ASSERT_EQ(map.points.size(), 4u);
  for (const auto& p : map.points) {
    EXPECT_GT(p.value, 0.5);
    EXPECT_LT(p.value, 1.0);
  }
  EXPECT_EQ(sidecar_json(map)["params"]["steps"], 300);
}

}  // namespace
}  // namespace qwalk
