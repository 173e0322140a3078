#include "doctest.h"

#include "ipp/planner.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ipp;

namespace {

PlannerConfig small_config(double extent = 12.0, double z_max = 14.0) {
  PlannerConfig c;
  c.workspace = Workspace{Vec3(0.0, 0.0, 1.0), Vec3(extent, extent, z_max)};
  c.lattice_points = 14;
  return c;
}

GPFieldMap small_prior(double extent = 12.0) {
  return build_prior(GridGeometry(Vec2::Zero(), extent, extent, 0.75), MaternKernel{}, 0.5);
}

}  // namespace

TEST_CASE("lattice presets on the 30 m area") {
  const Workspace ws{Vec3(0, 0, 1), Vec3(30, 30, 26)};
  const auto l30 = build_lattice(ws, 30, CameraConfig{});
  CHECK(l30.points.size() == 30u);
  REQUIRE(l30.layer_altitudes.size() == 4u);
  CHECK(l30.layer_altitudes[0] == doctest::Approx(6.495).epsilon(1e-3));
  CHECK(l30.layer_altitudes[1] == doctest::Approx(8.660).epsilon(1e-3));
  CHECK(l30.layer_altitudes[2] == doctest::Approx(12.990).epsilon(1e-3));
  CHECK(l30.layer_altitudes[3] == doctest::Approx(25.981).epsilon(1e-3));
  CHECK(l30.layer_sizes == std::vector<int>{4, 3, 2, 1});
  for (const auto& p : l30.points) CHECK(ws.contains(p));
  // the top point sits over the center
  CHECK(std::count_if(l30.points.begin(), l30.points.end(),
                      [](const Vec3& p) { return p.head<2>().isApprox(Vec2(15, 15)) && p.z() > 25.0; }) == 1);

  const auto l14 = build_lattice(ws, 14, CameraConfig{});
  CHECK(l14.points.size() == 14u);
  CHECK(l14.layer_sizes == std::vector<int>{3, 2, 1});
  CHECK_THROWS_AS(build_lattice(ws, 12, CameraConfig{}), std::invalid_argument);
}

TEST_CASE("flat workspace gives a single planar layer") {
  const Workspace ws{Vec3(0, 0, 8.660254), Vec3(30, 30, 8.660254)};
  const auto l = build_lattice(ws, 30, CameraConfig{});
  CHECK(l.layer_altitudes.size() == 1u);
  CHECK(l.points.size() == 9u);  // 10 m footprint over 30 m
  for (const auto& p : l.points) CHECK(p.z() == doctest::Approx(8.660254));
}

TEST_CASE("altitudes are clamped into the workspace") {
  const Workspace ws{Vec3(0, 0, 7.0), Vec3(30, 30, 20.0)};
  const auto l = build_lattice(ws, 30, CameraConfig{});
  CHECK(l.layer_altitudes.front() == doctest::Approx(7.0));
  CHECK(l.layer_altitudes.back() == doctest::Approx(20.0));
}

TEST_CASE("on a fresh prior the highest layer is the most informative single view") {
  PlannerConfig cfg = small_config();
  const MapBelief map = small_prior();
  const auto lattice = build_lattice(cfg.workspace, cfg.lattice_points, cfg.camera);
  std::size_t best = 0;
  double best_u = -1.0;
  for (std::size_t i = 0; i < lattice.points.size(); ++i) {
    const double u = pose_utility(map, lattice.points[i], cfg);
    CHECK(u > 0.0);
    if (u > best_u) {
      best_u = u;
      best = i;
    }
  }
  CHECK(lattice.points[best].z() == doctest::Approx(lattice.layer_altitudes.back()));
}

TEST_CASE("two waypoints are the start and the best-rate lattice point") {
  PlannerConfig cfg = small_config();
  const MapBelief map = small_prior();
  const auto lattice = build_lattice(cfg.workspace, cfg.lattice_points, cfg.camera);
  const Vec3 start(1.0, 1.0, 3.0);
  const auto w = greedy_lattice_search(map, start, 2, lattice, cfg);
  REQUIRE(w.size() == 2u);
  CHECK(w[0] == start);
  double best = -1.0;
  Vec3 arg;
  for (const auto& p : lattice.points) {
    const double r = pose_utility(map, p, cfg) / std::max((p - start).norm() / cfg.limits.v_max, cfg.min_travel_time);
    if (r > best * (1.0 + 1e-12)) {
      best = r;
      arg = p;
    }
  }
  CHECK(w[1] == arg);
  CHECK_THROWS_AS(greedy_lattice_search(map, Vec3(-5, 0, 3), 2, lattice, cfg), std::invalid_argument);
}

TEST_CASE("greedy search matches the exhaustive oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xy(0.0, 9.0), z(1.0, 12.0);
  const GridGeometry g(Vec2::Zero(), 9.0, 9.0, 0.75);
  for (int instance = 0; instance < 8; ++instance) {
    PlannerConfig cfg;
    cfg.workspace = Workspace{Vec3(0, 0, 1), Vec3(9, 9, 12)};
    cfg.adaptive.enabled = instance % 2 == 1;
    cfg.adaptive.mu_th = 0.55;
    GPFieldMap gp = build_prior(g, MaternKernel{}, 0.5);
    auto rows = measurement_layout(Vec3(xy(rng), xy(rng), z(rng)), cfg.camera, cfg.sensor, g).blocks;
    std::normal_distribution<double> val(0.5, 0.2);
    for (auto& r : rows) r.value = val(rng);
    fuse_in_place(gp, rows);

    Lattice lattice;
    for (int i = 0; i < 4; ++i) lattice.points.emplace_back(xy(rng), xy(rng), z(rng));
    const Vec3 start(xy(rng), xy(rng), z(rng));

    oracle::GreedyInstance inst;
    inst.map = {gp.mean, gp.cov};
    inst.points = lattice.points;
    inst.start = start;
    inst.observe = [&](const Eigen::Vector3d& p) {
      return oracle::observation(measurement_layout(p, cfg.camera, cfg.sensor, g).blocks, g.size());
    };
    inst.adaptive = cfg.adaptive.enabled;
    inst.mu_th = cfg.adaptive.mu_th;
    inst.beta = cfg.adaptive.beta;
    CHECK(greedy_lattice_search(MapBelief(gp), start, 3, lattice, cfg) == oracle::brute_force_greedy(inst, 3));
  }
}

TEST_CASE("an uninformative sensor gives zero utility") {
  PlannerConfig cfg = small_config();
  cfg.sensor.a = 1e15;
  const MapBelief map = small_prior();
  CHECK(pose_utility(map, Vec3(6, 6, 8), cfg) < 1e-9);
}

TEST_CASE("gains show diminishing returns") {
  PlannerConfig cfg = small_config();
  const MapBelief map = small_prior();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> xy(0.0, 12.0), z(1.0, 14.0);
  const UtilitySubset all;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec3> poses;
    double separate = 0.0;
    for (int k = 0; k < 4; ++k) {
      poses.emplace_back(xy(rng), xy(rng), z(rng));
      separate += sequence_gain(map, {poses.back()}, cfg, all);
    }
    const double joint = sequence_gain(map, poses, cfg, all);
    CHECK(joint <= separate + 1e-9);
    // a second view of the same spot adds less than the first
    const double once = sequence_gain(map, {poses[0]}, cfg, all);
    const double twice = sequence_gain(map, {poses[0], poses[0]}, cfg, all);
    CHECK(twice - once <= once + 1e-12);
    CHECK(twice >= once);
  }
}

TEST_CASE("adaptive utility is zero when nothing is interesting") {
  PlannerConfig cfg = small_config();
  cfg.adaptive.enabled = true;
  cfg.adaptive.mu_th = 100.0;
  const MapBelief map = small_prior();
  CHECK(utility_subset(map, cfg).cells.empty());
  CHECK(pose_utility(map, Vec3(6, 6, 8), cfg) == 0.0);
  cfg.adaptive.mu_th = 0.0;
  CHECK(utility_subset(map, cfg).cells.size() == 256u);
}

TEST_CASE("discrete utility is an entropy drop") {
  PlannerConfig cfg = small_config();
  cfg.mode = UtilityMode::DiscreteEntropy;
  const GridGeometry g(Vec2::Zero(), 12.0, 12.0, 0.75);
  MapBelief map = OccupancyMap(g, {"target"});
  const Vec3 pose(6, 6, 5);
  const auto& occ = std::get<OccupancyMap>(map);
  const auto after = predict_discrete_update(occ, "target", pose, cfg.camera, cfg.classifier);
  CHECK(pose_utility(map, pose, cfg) == doctest::Approx(entropy(occ, "target") - entropy(after, "target")));
  CHECK(pose_utility(map, pose, cfg) > 0.0);
}

TEST_CASE("scored value is gain over cost") {
  PlannerConfig cfg = small_config();
  const MapBelief map = small_prior();
  const std::vector<Vec3> w{Vec3(1, 1, 3), Vec3(6, 6, 10), Vec3(10, 3, 5)};
  const auto s = score_waypoints(map, w, 0.0, cfg, UtilitySubset{});
  const auto traj = PolynomialTrajectory::plan(w, cfg.limits);
  CHECK(s.cost == doctest::Approx(cost(traj)));
  CHECK(s.value == doctest::Approx(s.gain / s.cost));
  std::vector<Vec3> poses;
  for (const auto& p : measurement_poses(traj, cfg.camera.frequency_hz, cfg.max_measurements)) poses.push_back(p.position);
  CHECK(s.gain == doctest::Approx(sequence_gain(map, poses, cfg, UtilitySubset{})));
}

TEST_CASE("replan without optimisation returns the greedy seed") {
  PlannerConfig cfg = small_config();
  cfg.cma_iterations = 0;
  const MapBelief map = small_prior();
  const auto lattice = build_lattice(cfg.workspace, cfg.lattice_points, cfg.camera);
  const auto r = replan(map, Vec3(1, 1, 3), 2.0, lattice, cfg, true, 1);
  CHECK(r.waypoints == r.seed_waypoints);
  CHECK(!r.optimized);
  CHECK(r.score.value == r.seed_score.value);
  CHECK(r.seed_waypoints == greedy_lattice_search(map, Vec3(1, 1, 3), cfg.waypoints, lattice, cfg));
}

TEST_CASE("optimised replan is never worse than its seed and reports its exact score") {
  PlannerConfig cfg = small_config();
  cfg.cma_iterations = 10;
  GPFieldMap gp = small_prior();
  std::mt19937_64 rng(4);
  auto rows = measurement_layout(Vec3(9, 9, 13), cfg.camera, cfg.sensor, gp.geometry).blocks;
  fuse_in_place(gp, rows);
  const MapBelief map = gp;
  const auto lattice = build_lattice(cfg.workspace, cfg.lattice_points, cfg.camera);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = replan(map, Vec3(2, 2, 3), 3.0, lattice, cfg, true, seed);
    CHECK(r.score.value >= r.seed_score.value);
    const auto again = score_waypoints(map, r.waypoints, 3.0, cfg, utility_subset(map, cfg));
    CHECK(again.value == doctest::Approx(r.score.value).epsilon(1e-9));
    CHECK(r.waypoints.front() == Vec3(2, 2, 3));
    for (const auto& w : r.waypoints) CHECK(cfg.workspace.contains(w));
    const auto same = replan(map, Vec3(2, 2, 3), 3.0, lattice, cfg, true, seed);
    CHECK(same.waypoints == r.waypoints);
  }
}
