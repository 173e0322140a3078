#pragma once

#include "ipp/field.hpp"
#include "ipp/metrics.hpp"
#include "ipp/planner.hpp"

#include <random>
#include <string>
#include <vector>

namespace ipp {

enum class PlannerKind { CmaEs, Lattice, Lawnmower, Spiral, Random };

std::string to_string(PlannerKind kind);
PlannerKind planner_kind_from_string(const std::string& name);

struct MissionConfig {
  PlannerKind planner = PlannerKind::CmaEs;
  PlannerConfig planning;
  Vec3 start = Vec3(7.5, 7.5, 8.66);
  double lawnmower_altitude = 8.66;
  double spiral_z_start = 1.0;
  double spiral_z_end = 26.0;
  double value_scale = 0.01;     // truth units -> map units (continuous)
  double truth_threshold = 40.0; // truth units; cells at or above it count as interesting for delta_sigma2
};

struct MeasurementEvent {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
};

struct ReplanEvent {
  double t = 0.0;
  double seed_value = 0.0;
  double value = 0.0;
  double first_seed_altitude = 0.0;
  double first_altitude = 0.0;
  bool optimized = false;
  bool warning = false;
};

struct MissionResult {
  std::vector<MetricsRecord> records;  // t = 0 prior state, then one per measurement
  std::vector<MeasurementEvent> measurements;
  std::vector<ReplanEvent> replans;
  MapBelief final_map;
};

/// Metrics of `map` against the truth (already in map units) at time t.
MetricsRecord evaluate_map(const MapBelief& map, const Eigen::VectorXd& truth_map_units, const CellSet& truth_interesting,
                           const std::string& layer);

/// Replan / execute loop until the budget is spent. Measurements fire on a
/// global clock at k / f; every trajectory is flown to its end before the
/// next replan, except the last which is cut at the budget. A trajectory
/// shorter than the gap to the next tick is followed by a hover until it.
MissionResult run_mission(const GroundTruthField& truth, MapBelief map, const MissionConfig& config,
                          std::mt19937_64& sensor_rng, std::mt19937_64& planner_rng, int trial = 0);

}  // namespace ipp
