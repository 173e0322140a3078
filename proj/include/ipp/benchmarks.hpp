#pragma once

#include "ipp/grid.hpp"
#include "ipp/sensor.hpp"
#include "ipp/trajectory.hpp"

#include <random>

namespace ipp {

struct LawnmowerPlan {
  PolylinePath path;
  double speed;          // m/s, path length / budget
  double pass_spacing;   // m
  int passes;
};

/// Fixed-altitude boustrophedon sweep over the rectangle [lo, hi] (x, y).
/// Passes run along y, spaced one footprint width apart in x; the sweep is
/// stretched to exactly the budget. A footprint covering the whole area
/// yields a hover at the center.
LawnmowerPlan lawnmower(const Vec2& area_lo, const Vec2& area_hi, const CameraConfig& camera, double budget,
                        double altitude);

/// Ascending conical spiral centered on the area, radius min(W, H) / 2 at
/// z_start shrinking linearly to zero at z_end. The turn count is chosen so
/// the helix is v_max * budget long; flown at constant speed over the budget.
ConicalSpiralPath spiral(const Vec2& area_lo, const Vec2& area_hi, double budget, double z_start, double z_end,
                         double v_max);

/// Uniform random destination inside the workspace.
Vec3 random_destination(const Workspace& workspace, std::mt19937_64& rng);

/// Two-waypoint polynomial from `current` to a fresh random destination.
PolynomialTrajectory random_planner(const Vec3& current, const Workspace& workspace, const TrajectoryLimits& limits,
                                    std::mt19937_64& rng);

}  // namespace ipp
