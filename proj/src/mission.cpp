#include "ipp/mission.hpp"

#include "ipp/benchmarks.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace ipp {
namespace {

// Index of the first sensor tick at or after time t.
long first_tick(double t, double f) { return static_cast<long>(std::ceil(t * f - 1e-9)); }

}  // namespace

std::string to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::CmaEs: return "cmaes";
    case PlannerKind::Lattice: return "lattice";
    case PlannerKind::Lawnmower: return "lawnmower";
    case PlannerKind::Spiral: return "spiral";
    case PlannerKind::Random: return "random";
  }
  throw std::invalid_argument("unknown planner kind");
}

PlannerKind planner_kind_from_string(const std::string& name) {
  for (auto k : {PlannerKind::CmaEs, PlannerKind::Lattice, PlannerKind::Lawnmower, PlannerKind::Spiral, PlannerKind::Random})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown planner '" + name + "' (expected cmaes, lattice, lawnmower, spiral or random)");
}

MetricsRecord evaluate_map(const MapBelief& map, const Eigen::VectorXd& truth, const CellSet& truth_interesting,
                           const std::string& layer) {
  MetricsRecord r;
  if (const auto* gp = std::get_if<GPFieldMap>(&map)) {
    r.uncertainty = trace_uncertainty(*gp);
    r.rmse = rmse(gp->mean, truth);
    r.wrmse = wrmse(gp->mean, truth);
    r.mll = mll(*gp, truth);
    r.wmll = wmll(*gp, truth);
    r.delta_sigma2 = delta_sigma2(gp->cov.diagonal(), truth_interesting);
  } else {
    const auto& occ = std::get<OccupancyMap>(map);
    const Eigen::VectorXd p = occ.probabilities(layer);
    r.uncertainty = entropy(occ, layer);
    r.rmse = rmse(p, truth);
    r.wrmse = wrmse(p, truth);
    r.mll = r.wmll = r.delta_sigma2 = std::nan("");
  }
  return r;
}

MissionResult run_mission(const GroundTruthField& truth, MapBelief map, const MissionConfig& config,
                          std::mt19937_64& sensor_rng, std::mt19937_64& planner_rng, int trial) {
  const PlannerConfig& pc = config.planning;
  pc.validate();
  const bool continuous = std::holds_alternative<GPFieldMap>(map);
  if (continuous != (pc.mode == UtilityMode::ContinuousTrace))
    throw std::invalid_argument("map type does not match the planner utility mode");
  const GridGeometry& geom = continuous ? std::get<GPFieldMap>(map).geometry : std::get<OccupancyMap>(map).geometry();
  if (!(geom == truth.geometry)) throw std::invalid_argument("map and ground truth use different grids");

  GroundTruthField sensed = truth;  // truth as the sensor reports it, in map units
  if (continuous) sensed.values *= config.value_scale;
  CellSet truth_interesting;
  for (int i = 0; i < truth.geometry.size(); ++i)
    if (truth.values[i] >= config.truth_threshold) truth_interesting.push_back(i);

  MissionResult out;
  const std::string name = to_string(config.planner);
  auto record = [&](double t) {
    MetricsRecord r = evaluate_map(map, sensed.values, truth_interesting, pc.layer);
    r.t = t;
    r.measurements = static_cast<int>(out.measurements.size());
    r.trial = trial;
    r.planner = name;
    out.records.push_back(std::move(r));
  };
  auto measure = [&](double t, const Vec3& requested) {
    const Vec3 p = sensor_pose(requested, pc);
    if (continuous) {
      auto& gp = std::get<GPFieldMap>(map);
      fuse_in_place(gp, simulate_continuous_measurement(p, pc.camera, pc.sensor, sensed, sensor_rng).blocks);
    } else {
      auto& occ = std::get<OccupancyMap>(map);
      update_discrete(occ, pc.layer, simulate_binary_measurement(p, pc.camera, pc.classifier, sensed, sensor_rng), p.z(),
                      pc.classifier);
    }
    out.measurements.push_back({t, p});
    record(t);
  };

  record(0.0);
  const double f = pc.camera.frequency_hz;
  const double budget = pc.budget;
  const Vec2 area_lo = geom.origin();
  const Vec2 area_hi = geom.origin() + Vec2(geom.width(), geom.height());
  Lattice lattice;
  if (config.planner == PlannerKind::CmaEs || config.planner == PlannerKind::Lattice)
    lattice = build_lattice(pc.workspace, pc.lattice_points, pc.camera);

  double t = 0.0;
  Vec3 pose = config.start;
  for (;;) {
    const long k0 = first_tick(t, f);
    const double phase = static_cast<double>(k0) / f - t;
    if (t >= budget - 1e-9) {
      // Arrived exactly at the budget: a tick due now still fires, in place.
      if (phase < 1e-9 && static_cast<double>(k0) / f <= budget + 1e-9) measure(std::min(t, budget), pose);
      break;
    }
    std::unique_ptr<FlightPath> path;
    switch (config.planner) {
      case PlannerKind::Lawnmower:
        path = std::make_unique<PolylinePath>(
            lawnmower(area_lo, area_hi, pc.camera, budget - t, config.lawnmower_altitude).path);
        break;
      case PlannerKind::Spiral:
        path = std::make_unique<ConicalSpiralPath>(
            spiral(area_lo, area_hi, budget - t, config.spiral_z_start, config.spiral_z_end, pc.limits.v_max));
        break;
      case PlannerKind::Random:
        path = std::make_unique<PolynomialTrajectory>(random_planner(pose, pc.workspace, pc.limits, planner_rng));
        break;
      case PlannerKind::CmaEs:
      case PlannerKind::Lattice: {
        const std::uint64_t seed = planner_rng();
        ReplanResult r = replan(map, pose, phase, lattice, pc, config.planner == PlannerKind::CmaEs, seed);
        out.replans.push_back({t, r.seed_score.value, r.score.value, r.seed_waypoints.size() > 1 ? r.seed_waypoints[1].z() : 0.0,
                               r.waypoints.size() > 1 ? r.waypoints[1].z() : 0.0, r.optimized, r.warning});
        path = std::make_unique<PolynomialTrajectory>(std::move(r.trajectory));
        break;
      }
    }

    const double end = t + path->duration();
    const bool last = end >= budget;
    bool measured = false;
    for (long k = k0;; ++k) {
      const double tau = static_cast<double>(k) / f;
      if (last ? tau > budget + 1e-9 : tau >= end - 1e-9) break;
      measure(std::min(tau, budget), path->position(tau - t));
      measured = true;
    }
    pose = path->position(path->duration());
    if (last) break;
    // Nothing fell inside this flight: hover at its end until the next tick.
    t = measured ? end : std::max(end, static_cast<double>(first_tick(end, f)) / f);
  }
  out.final_map = std::move(map);
  return out;
}

}  // namespace ipp
