#include "ipp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace ipp {
namespace {

constexpr double kTieTolerance = 1e-12;

void check_workspace(const Workspace& ws) {
  if (!(ws.hi.x() > ws.lo.x()) || !(ws.hi.y() > ws.lo.y()))
    throw std::invalid_argument("workspace has no lateral extent");
  if (!(ws.lo.z() > 0.0)) throw std::invalid_argument("workspace minimum altitude must be positive");
  if (ws.hi.z() < ws.lo.z()) throw std::invalid_argument("workspace altitude range is inverted");
}

double tan_half(double fov_deg) { return std::tan(fov_deg * std::numbers::pi / 360.0); }

std::vector<MeasurementBlock> continuous_rows(const GPFieldMap& gp, const std::vector<Vec3>& poses,
                                              const PlannerConfig& config) {
  std::vector<MeasurementBlock> rows;
  for (const Vec3& p : poses) {
    auto layout = measurement_layout(sensor_pose(p, config), config.camera, config.sensor, gp.geometry);
    rows.insert(rows.end(), std::make_move_iterator(layout.blocks.begin()), std::make_move_iterator(layout.blocks.end()));
  }
  return rows;
}

std::vector<Vec3> trajectory_poses(const PolynomialTrajectory& traj, double phase, const PlannerConfig& config) {
  std::vector<Vec3> poses;
  for (const auto& tp : measurement_poses(traj, config.camera.frequency_hz, config.max_measurements, phase))
    poses.push_back(tp.position);
  return poses;
}

}  // namespace

Lattice build_lattice_layers(const Workspace& workspace, const std::vector<int>& sides, const CameraConfig& camera) {
  check_workspace(workspace);
  camera.validate();
  if (sides.empty()) throw std::invalid_argument("lattice needs at least one layer");
  for (std::size_t i = 0; i < sides.size(); ++i)
    if (sides[i] < 1 || (i > 0 && sides[i] >= sides[i - 1]))
      throw std::invalid_argument("lattice layer sizes must be positive and strictly decreasing");

  const double w = workspace.hi.x() - workspace.lo.x();
  const double h = workspace.hi.y() - workspace.lo.y();
  Lattice lattice;
  for (int k : sides) {
    const double kd = static_cast<double>(k);
    const double alt = std::max(w / kd / (2.0 * tan_half(camera.fov_x_deg)), h / kd / (2.0 * tan_half(camera.fov_y_deg)));
    const double z = std::clamp(alt, workspace.lo.z(), workspace.hi.z());
    lattice.layer_altitudes.push_back(z);
    lattice.layer_sizes.push_back(k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c)
        lattice.points.emplace_back(workspace.lo.x() + (c + 0.5) * w / kd, workspace.lo.y() + (r + 0.5) * h / kd, z);
  }
  return lattice;
}

Lattice build_lattice(const Workspace& workspace, int target_points, const CameraConfig& camera) {
  check_workspace(workspace);
  camera.validate();
  if (workspace.hi.z() - workspace.lo.z() < 1e-12) {
    const Vec2 half = camera.half_extent(workspace.lo.z());
    const double w = workspace.hi.x() - workspace.lo.x();
    const double h = workspace.hi.y() - workspace.lo.y();
    const int k = std::max(1, static_cast<int>(std::ceil(std::max(w / (2.0 * half.x()), h / (2.0 * half.y())) - 1e-3)));
    Lattice lattice;
    lattice.layer_altitudes.push_back(workspace.lo.z());
    lattice.layer_sizes.push_back(k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c)
        lattice.points.emplace_back(workspace.lo.x() + (c + 0.5) * w / k, workspace.lo.y() + (r + 0.5) * h / k,
                                    workspace.lo.z());
    return lattice;
  }
  std::vector<int> sides;
  int total = 0;
  for (int k = 1; total < target_points; ++k) {
    total += k * k;
    sides.insert(sides.begin(), k);
  }
  if (total != target_points || target_points < 1)
    throw std::invalid_argument("lattice point count must be 1 + 4 + ... + k^2 (e.g. 14 or 30), got " +
                                std::to_string(target_points));
  return build_lattice_layers(workspace, sides, camera);
}

void PlannerConfig::validate() const {
  if (waypoints < 2) throw std::invalid_argument("planner needs at least two waypoints");
  if (!(budget > 0.0)) throw std::invalid_argument("planning budget must be positive");
  if (max_measurements < 1) throw std::invalid_argument("max_measurements must be at least 1");
  if ((step_sizes.array() <= 0.0).any()) throw std::invalid_argument("CMA-ES step sizes must be positive");
  if (cma_iterations < 0) throw std::invalid_argument("CMA-ES iteration count must be non-negative");
  if (!(min_travel_time > 0.0)) throw std::invalid_argument("minimum travel time must be positive");
  if (adaptive.beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  check_workspace(workspace);
  camera.validate();
  if (mode == UtilityMode::ContinuousTrace) {
    sensor.validate();
  } else {
    classifier.validate();
    if (workspace.lo.z() < classifier.min_altitude() || workspace.hi.z() > classifier.max_altitude())
      throw std::invalid_argument("workspace altitudes exceed the classifier model range");
  }
}

UtilitySubset utility_subset(const MapBelief& map, const PlannerConfig& config) {
  UtilitySubset s;
  if (!config.adaptive.enabled) return s;
  s.all = false;
  if (const auto* gp = std::get_if<GPFieldMap>(&map))
    s.cells = interesting_cells_continuous(*gp, config.adaptive.mu_th, config.adaptive.beta);
  else
    s.cells = interesting_cells_discrete(std::get<OccupancyMap>(map), config.layer, config.adaptive.p_th);
  return s;
}

Vec3 sensor_pose(const Vec3& p, const PlannerConfig& config) { return config.workspace.clamp(p); }

double sequence_gain(const MapBelief& map, const std::vector<Vec3>& poses, const PlannerConfig& config,
                     const UtilitySubset& subset) {
  if (poses.empty() || (!subset.all && subset.cells.empty())) return 0.0;
  if (const auto* gp = std::get_if<GPFieldMap>(&map)) return trace_reduction(*gp, continuous_rows(*gp, poses, config), subset.ptr());
  const auto& occ = std::get<OccupancyMap>(map);
  OccupancyMap copy = occ;
  for (const Vec3& p : poses)
    apply_predicted_discrete_update(copy, config.layer, sensor_pose(p, config), config.camera, config.classifier);
  return entropy(occ, config.layer, subset.ptr()) - entropy(copy, config.layer, subset.ptr());
}

double pose_utility(const MapBelief& map, const Vec3& pose, const PlannerConfig& config) {
  return sequence_gain(map, {pose}, config, utility_subset(map, config));
}

void apply_prediction(MapBelief& map, const Vec3& pose, const PlannerConfig& config) {
  const Vec3 p = sensor_pose(pose, config);
  if (auto* gp = std::get_if<GPFieldMap>(&map)) {
    predict_in_place(*gp, measurement_layout(p, config.camera, config.sensor, gp->geometry).blocks);
  } else {
    apply_predicted_discrete_update(std::get<OccupancyMap>(map), config.layer, p, config.camera, config.classifier);
  }
}

std::vector<Vec3> greedy_lattice_search(const MapBelief& map, const Vec3& start, int n, const Lattice& lattice,
                                        const PlannerConfig& config) {
  if (n < 1) throw std::invalid_argument("greedy search needs n >= 1");
  if (lattice.points.empty()) throw std::invalid_argument("empty lattice");
  if (!config.workspace.contains(start, 1e-6)) throw std::invalid_argument("start pose lies outside the workspace");

  MapBelief work = map;
  std::vector<Vec3> chosen{start};
  std::vector<double> rate(lattice.points.size());
  while (static_cast<int>(chosen.size()) < n) {
    const Vec3& prev = chosen.back();
    const UtilitySubset subset = utility_subset(work, config);
    double best = 0.0;
    for (std::size_t i = 0; i < lattice.points.size(); ++i) {
      const double gain = sequence_gain(work, {lattice.points[i]}, config, subset);
      const double cost = std::max(straight_line_time(prev, lattice.points[i], config.limits.v_max), config.min_travel_time);
      rate[i] = gain / cost;
      best = std::max(best, rate[i]);
    }

    std::size_t pick = 0;
    if (best > 0.0) {
      while (rate[pick] < best - kTieTolerance * best) ++pick;
    } else {
      double nearest = std::numeric_limits<double>::infinity();
      bool found = false;
      for (std::size_t i = 0; i < lattice.points.size(); ++i) {
        const bool visited =
            std::any_of(chosen.begin(), chosen.end(), [&](const Vec3& c) { return c == lattice.points[i]; });
        const double d = (lattice.points[i] - prev).norm();
        if (!visited && d < nearest) {
          nearest = d;
          pick = i;
          found = true;
        }
      }
      if (!found) pick = 0;
    }
    chosen.push_back(lattice.points[pick]);
    apply_prediction(work, lattice.points[pick], config);
  }
  return chosen;
}

TrajectoryScore score_waypoints(const MapBelief& map, const std::vector<Vec3>& waypoints, double phase,
                                const PlannerConfig& config, const UtilitySubset& subset) {
  const auto traj = PolynomialTrajectory::plan(waypoints, config.limits);
  TrajectoryScore s;
  s.gain = sequence_gain(map, trajectory_poses(traj, phase, config), config, subset);
  s.cost = cost(traj);
  s.value = s.gain / s.cost;
  return s;
}

ReplanResult replan(const MapBelief& map, const Vec3& start, double phase, const Lattice& lattice,
                    const PlannerConfig& config, bool optimize, std::uint64_t seed) {
  ReplanResult out;
  // A tick at the start pose is taken by every candidate alike: fold it into
  // the planning map and score the ticks that follow.
  MapBelief base = map;
  if (phase < 1e-9) {
    apply_prediction(base, start, config);
    phase = 1.0 / config.camera.frequency_hz;
  }
  out.seed_waypoints = greedy_lattice_search(base, start, config.waypoints, lattice, config);
  const UtilitySubset subset = utility_subset(base, config);
  out.seed_score = score_waypoints(base, out.seed_waypoints, phase, config, subset);
  out.waypoints = out.seed_waypoints;
  out.score = out.seed_score;

  if (optimize && config.cma_iterations > 0) {
    const auto free = static_cast<Eigen::Index>(config.waypoints - 1);
    CmaConfig cma;
    cma.population_size = config.cma_population;
    cma.max_iterations = config.cma_iterations;
    cma.seed = seed;
    cma.initial_step_sizes.resize(3 * free);
    cma.lower.resize(3 * free);
    cma.upper.resize(3 * free);
    Eigen::VectorXd x0(3 * free);
    for (Eigen::Index k = 0; k < free; ++k) {
      cma.initial_step_sizes.segment<3>(3 * k) = config.step_sizes;
      cma.lower.segment<3>(3 * k) = config.workspace.lo;
      Vec3 hi = config.workspace.hi;
      hi.z() = std::max(hi.z(), config.workspace.lo.z() + 1e-9);  // flat workspaces still need lo < hi
      cma.upper.segment<3>(3 * k) = hi;
      x0.segment<3>(3 * k) = out.seed_waypoints[static_cast<std::size_t>(k + 1)];
    }
    auto to_waypoints = [&](const Eigen::VectorXd& x) {
      std::vector<Vec3> w{start};
      for (Eigen::Index k = 0; k < free; ++k) w.emplace_back(x.segment<3>(3 * k));
      return w;
    };
    // Candidates are ranked in single precision on continuous maps; the
    // winner is rescored exactly below.
    std::optional<ApproxTraceReduction> approx;
    if (const auto* gp = std::get_if<GPFieldMap>(&base)) approx.emplace(*gp, subset.ptr());
    auto objective = [&](const Eigen::VectorXd& x) {
      try {
        if (!approx) return score_waypoints(base, to_waypoints(x), phase, config, subset).value;
        if (!subset.all && subset.cells.empty()) return 0.0;
        const auto traj = PolynomialTrajectory::plan(to_waypoints(x), config.limits);
        const auto poses = trajectory_poses(traj, phase, config);
        const double gain = poses.empty() ? 0.0 : (*approx)(continuous_rows(std::get<GPFieldMap>(base), poses, config));
        return gain / cost(traj);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    try {
      const CmaResult r = maximize(objective, x0, cma);
      out.evaluations = r.evaluations;
      const auto candidate = to_waypoints(r.x);
      const TrajectoryScore exact = score_waypoints(base, candidate, phase, config, subset);
      if (exact.value > out.seed_score.value) {
        out.waypoints = candidate;
        out.score = exact;
        out.optimized = true;
      }
    } catch (const std::exception&) {
      out.warning = true;
    }
  }
  out.trajectory = PolynomialTrajectory::plan(out.waypoints, config.limits);
  return out;
}

}  // namespace ipp
