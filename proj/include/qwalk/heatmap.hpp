#pragma once

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/ensemble.hpp"
#include "qwalk/format.hpp"
#include "qwalk/games.hpp"
#include "qwalk/gcd.hpp"
#include "qwalk/measurement.hpp"

namespace qwalk {

/// Quantities mapped over the (alpha, beta) strategy plane.
enum class HeatmapKind {
  pi_left,   // Pi_L, Hadamard walk
  pi_right,  // Pi_R, Hadamard walk
  p2t,       // P_R(2T), two measurements
  halfline,  // Pi_L under right-half-line broken links (Monte Carlo)
  sigma_a,   // Alice's win density for m measurements
  sigma_b,   // Bob's win density for m measurements
};

inline HeatmapKind parse_heatmap_kind(std::string_view name) {
  if (name == "pi-left") return HeatmapKind::pi_left;
  if (name == "pi-right") return HeatmapKind::pi_right;
  if (name == "p2T") return HeatmapKind::p2t;
  if (name == "halfline") return HeatmapKind::halfline;
  if (name == "sigma-a") return HeatmapKind::sigma_a;
  if (name == "sigma-b") return HeatmapKind::sigma_b;
  throw std::invalid_argument("unknown heatmap '" + std::string(name) + "'");
}

inline const char* to_string(HeatmapKind kind) {
  switch (kind) {
    case HeatmapKind::pi_left: return "pi-left";
    case HeatmapKind::pi_right: return "pi-right";
    case HeatmapKind::p2t: return "p2T";
    case HeatmapKind::halfline: return "halfline";
    case HeatmapKind::sigma_a: return "sigma-a";
    case HeatmapKind::sigma_b: return "sigma-b";
  }
  return "?";
}

struct Zone {
  double lo;
  double hi;
};

/// Probability bands used to shade each map. The Hadamard maps use seven
/// bands; the two-measurement map three; the half-line map its own seven.
inline std::vector<Zone> zones_for(HeatmapKind kind, int m = 1) {
  static const std::vector<Zone> seven = {{0.29, 0.34}, {0.34, 0.39}, {0.39, 0.45}, {0.45, 0.52},
                                          {0.52, 0.60}, {0.60, 0.65}, {0.65, 0.71}};
  static const std::vector<Zone> three = {{0.39, 0.45}, {0.45, 0.52}, {0.52, 0.60}};
  static const std::vector<Zone> halfline = {{0.738, 0.746}, {0.746, 0.755}, {0.755, 0.763},
                                             {0.763, 0.771}, {0.771, 0.780}, {0.780, 0.789},
                                             {0.789, 0.797}};
  switch (kind) {
    case HeatmapKind::pi_left:
    case HeatmapKind::pi_right: return seven;
    case HeatmapKind::p2t: return three;
    case HeatmapKind::halfline: return halfline;
    case HeatmapKind::sigma_a:
    case HeatmapKind::sigma_b: return m == 1 ? seven : three;
  }
  return {};
}

/// Index of the zone holding `value`, or -1 when outside every zone.
inline int zone_index(const std::vector<Zone>& zones, double value) {
  for (std::size_t i = 0; i < zones.size(); ++i) {
    if (value >= zones[i].lo && value <= zones[i].hi) return static_cast<int>(i);
  }
  return -1;
}

struct HeatmapParams {
  std::size_t grid = 201;
  int m = 1;
  /// Only for HeatmapKind::halfline; angles and region are overridden per point.
  EnsembleConfig ensemble{};
};

struct HeatmapPoint {
  double alpha;
  double beta;
  double value;
};

struct Heatmap {
  HeatmapKind kind;
  HeatmapParams params;
  std::vector<HeatmapPoint> points;
  std::vector<Zone> zones;

  [[nodiscard]] std::pair<double, double> value_range() const {
    double lo = points.front().value;
    double hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p.value);
      hi = std::max(hi, p.value);
    }
    return {lo, hi};
  }
};

/// Evaluates a heatmap on a uniform grid x grid lattice including the
/// endpoints alpha in {0 .. pi}, beta in {0 .. 2 pi}. Rows are alpha-major.
inline Heatmap compute_heatmap(HeatmapKind kind, const HeatmapParams& params) {
  if (params.grid < 2) throw std::invalid_argument("heatmap grid must be >= 2");
  if (params.m < 1) throw std::invalid_argument("measurements m must be >= 1");
  Heatmap map{kind, params, {}, zones_for(kind, params.m)};
  const std::size_t n = params.grid;
  map.points.resize(n * n);
  auto angle_at = [n](std::size_t i, double span) {
    return i + 1 == n ? span : span * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  auto value_at = [&](const BlochAngles& angles) {
    switch (kind) {
      case HeatmapKind::pi_left: return pi_hadamard(angles).left;
      case HeatmapKind::pi_right: return pi_hadamard(angles).right;
      case HeatmapKind::p2t: return chain_distribution(2, pi_hadamard(angles)).right;
      case HeatmapKind::sigma_a: return win_density(angles, params.m).alice;
      case HeatmapKind::sigma_b: return win_density(angles, params.m).bob;
      case HeatmapKind::halfline: {
        EnsembleConfig config = params.ensemble;
        config.region = LinkRegion::right_half_line;
        config.angles = angles;
        return run_ensemble(config).pi_left;
      }
    }
    return 0.0;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const BlochAngles angles(angle_at(i, pi), angle_at(j, 2.0 * pi));
      map.points[i * n + j] = {angles.alpha(), angles.beta(), value_at(angles)};
    }
  }
  return map;
}

/// CSV: alpha,beta,value
inline void write_csv(std::ostream& os, const Heatmap& map) {
  os << "alpha,beta,value\n";
  for (const auto& p : map.points) {
    os << fmt17(p.alpha) << ',' << fmt17(p.beta) << ',' << fmt17(p.value) << '\n';
  }
}

/// Metadata written next to the CSV: zones, parameters and value range.
inline nlohmann::json sidecar_json(const Heatmap& map) {
  nlohmann::json zones = nlohmann::json::array();
  for (const auto& z : map.zones) zones.push_back({z.lo, z.hi});
  const auto [lo, hi] = map.value_range();
  nlohmann::json params = {{"grid", map.params.grid}, {"m", map.params.m}};
  if (map.kind == HeatmapKind::halfline) {
    const auto& e = map.params.ensemble;
    params["r"] = e.r;
    params["theta"] = e.coin.theta();
    params["steps"] = e.steps;
    params["trajectories"] = e.trajectories;
    params["seed"] = e.master_seed;
    params["half_line_boundary"] = e.half_line_boundary;
  }
  return {{"which", to_string(map.kind)},
          {"columns", {"alpha", "beta", "value"}},
          {"params", params},
          {"zones", zones},
          {"value_range", {lo, hi}}};
}

/// Grid as a single JSON document (sidecar fields plus the points).
inline nlohmann::json to_json(const Heatmap& map) {
  nlohmann::json doc = sidecar_json(map);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : map.points) rows.push_back({p.alpha, p.beta, p.value});
  doc["points"] = std::move(rows);
  return doc;
}

}  // namespace qwalk
