#pragma once

#include "ipp/cmaes.hpp"
#include "ipp/gp_map.hpp"
#include "ipp/grid.hpp"
#include "ipp/occupancy_map.hpp"
#include "ipp/sensor.hpp"
#include "ipp/trajectory.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ipp {

/// Candidate viewpoints on stacked square grids, densest at the bottom.
struct Lattice {
  std::vector<Vec3> points;
  std::vector<double> layer_altitudes;  // ascending
  std::vector<int> layer_sizes;         // points per side in each layer
};

/// Preset 30 = 4x4 + 3x3 + 2x2 + 1 points, preset 14 = 3x3 + 2x2 + 1; any
/// count of the form 1 + 4 + ... + k^2 is accepted. The layer with k points
/// per side sits where the footprint spans extent / k, clamped into
/// [lo.z, hi.z]; points are cell centers of the k x k subdivision. When
/// lo.z == hi.z a single planar grid of footprint-sized cells is returned.
Lattice build_lattice(const Workspace& workspace, int target_points, const CameraConfig& camera);

/// Lattice from explicit per-layer sizes (points per side), bottom first.
Lattice build_lattice_layers(const Workspace& workspace, const std::vector<int>& sides, const CameraConfig& camera);

enum class UtilityMode { DiscreteEntropy, ContinuousTrace };

struct AdaptiveSettings {
  bool enabled = false;
  double mu_th = 0.4;  // map units
  double beta = 3.0;
  double p_th = 0.4;
};

using MapBelief = std::variant<OccupancyMap, GPFieldMap>;

struct PlannerConfig {
  int waypoints = 5;
  double budget = 200.0;
  UtilityMode mode = UtilityMode::ContinuousTrace;
  AdaptiveSettings adaptive;
  Workspace workspace;
  int lattice_points = 30;
  TrajectoryLimits limits;
  std::size_t max_measurements = 10;
  Vec3 step_sizes = Vec3(3.0, 3.0, 4.0);
  int cma_population = 0;  // 0 selects the default
  int cma_iterations = 45;
  double min_travel_time = 1.0;  // floor on greedy travel cost (s)
  CameraConfig camera;
  ContinuousSensorModel sensor;
  BinaryClassifierModel classifier = BinaryClassifierModel::default_model();
  std::string layer = "target";

  void validate() const;
};

/// Cells the utility is restricted to. `all` covers the whole map
/// (non-adaptive planning).
struct UtilitySubset {
  bool all = true;
  CellSet cells;
  const CellSet* ptr() const { return all ? nullptr : &cells; }
};

UtilitySubset utility_subset(const MapBelief& map, const PlannerConfig& config);

/// Sensor pose actually used for a requested position: clamped into the workspace.
Vec3 sensor_pose(const Vec3& p, const PlannerConfig& config);

/// Information gain of measuring from every pose in turn, without sampling:
/// entropy drop under most-likely-label prediction, or the trace drop of the
/// joint Kalman update. Restricted to `subset`.
double sequence_gain(const MapBelief& map, const std::vector<Vec3>& poses, const PlannerConfig& config,
                     const UtilitySubset& subset);

/// Single-pose utility with the subset derived from `map`.
double pose_utility(const MapBelief& map, const Vec3& pose, const PlannerConfig& config);

/// Applies the predicted (noise-free) measurement at `pose` in place.
void apply_prediction(MapBelief& map, const Vec3& pose, const PlannerConfig& config);

/// Greedy next-best-point search. Each step picks the lattice point with the
/// highest gain / max(straight-line time, min_travel_time), ties (relative
/// 1e-12) to the lowest index, then applies its predicted measurement. If
/// every rate is zero the nearest point not yet in the list is taken.
std::vector<Vec3> greedy_lattice_search(const MapBelief& map, const Vec3& start, int n, const Lattice& lattice,
                                        const PlannerConfig& config);

struct TrajectoryScore {
  double gain = 0.0;
  double cost = 0.0;
  double value = 0.0;  // gain / cost
};

/// Plans the polynomial through `waypoints`, takes up to max_measurements
/// poses starting `phase` seconds in, and scores gain / travel time.
TrajectoryScore score_waypoints(const MapBelief& map, const std::vector<Vec3>& waypoints, double phase,
                                const PlannerConfig& config, const UtilitySubset& subset);

struct ReplanResult {
  PolynomialTrajectory trajectory;
  std::vector<Vec3> seed_waypoints;
  std::vector<Vec3> waypoints;
  TrajectoryScore seed_score;
  TrajectoryScore score;
  bool optimized = false;  // true when the CMA-ES result beat the seed
  bool warning = false;    // optimizer failed; seed returned
  int evaluations = 0;
};

/// Greedy lattice seed followed, when `optimize` is set, by CMA-ES over the
/// free waypoints. Returns the better of the two. `phase` is the delay until
/// the next sensor tick; a tick at the start pose (phase 0) is predicted into
/// the planning map up front and the score counts the ticks after it.
ReplanResult replan(const MapBelief& map, const Vec3& start, double phase, const Lattice& lattice,
                    const PlannerConfig& config, bool optimize, std::uint64_t seed);

}  // namespace ipp
