#include "ipp/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ipp {
namespace {

// Along-track extent [a, b] of a sweep over [lo, hi] with footprint width fp:
// reaches the edge when the area allows, collapses to the middle otherwise.
std::pair<double, double> sweep_range(double lo, double hi, double fp) {
  const double w = hi - lo;
  if (w <= fp) return {0.5 * (lo + hi), 0.5 * (lo + hi)};
  const double e = std::min(fp / 2.0, (w - fp) / 2.0);
  return {lo + fp / 2.0 - e, hi - fp / 2.0 + e};
}

}  // namespace

LawnmowerPlan lawnmower(const Vec2& area_lo, const Vec2& area_hi, const CameraConfig& camera, double budget,
                        double altitude) {
  camera.validate();
  if (!(budget > 0.0)) throw std::invalid_argument("lawnmower budget must be positive");
  if (!(altitude > 0.0)) throw std::invalid_argument("lawnmower altitude must be positive");
  if ((area_hi.array() <= area_lo.array()).any()) throw std::invalid_argument("lawnmower area is empty");

  const Vec2 half = camera.half_extent(altitude);
  const double fp_x = 2.0 * half.x(), fp_y = 2.0 * half.y();
  const double width = area_hi.x() - area_lo.x();

  std::vector<double> xs;
  if (width <= fp_x) {
    xs.push_back(0.5 * (area_lo.x() + area_hi.x()));
  } else {
    // Slack for altitudes quoted to a few decimals (8.66 m for a 10 m footprint).
    const int k = static_cast<int>(std::ceil(width / fp_x - 1e-3));
    for (int i = 0; i < k; ++i)
      xs.push_back(area_lo.x() + fp_x / 2.0 + (width - fp_x) * static_cast<double>(i) / static_cast<double>(k - 1));
  }
  const auto [y0, y1] = sweep_range(area_lo.y(), area_hi.y(), fp_y);

  std::vector<Vec3> points;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool up = i % 2 == 0;
    points.emplace_back(xs[i], up ? y0 : y1, altitude);
    if (y1 > y0) points.emplace_back(xs[i], up ? y1 : y0, altitude);
  }
  PolylinePath path(points, budget);
  const double spacing = xs.size() > 1 ? xs[1] - xs[0] : fp_x;
  const double speed = path.speed();
  return {std::move(path), speed, spacing, static_cast<int>(xs.size())};
}

ConicalSpiralPath spiral(const Vec2& area_lo, const Vec2& area_hi, double budget, double z_start, double z_end,
                         double v_max) {
  if (!(budget > 0.0) || !(v_max > 0.0)) throw std::invalid_argument("spiral budget and speed must be positive");
  if (!(z_start > 0.0) || !(z_end > z_start)) throw std::invalid_argument("spiral altitudes must satisfy 0 < z_start < z_end");
  const Vec2 center = 0.5 * (area_lo + area_hi);
  const double radius = 0.5 * (area_hi - area_lo).minCoeff();
  if (!(radius > 0.0)) throw std::invalid_argument("spiral area is empty");

  const double target = v_max * budget;
  double lo = 0.0;
  double turns = 0.0;
  if (ConicalSpiralPath::helix_length(radius, z_start, z_end, 0.0) < target) {
    double hi = 1.0;
    while (ConicalSpiralPath::helix_length(radius, z_start, z_end, hi) < target) hi *= 2.0;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (ConicalSpiralPath::helix_length(radius, z_start, z_end, mid) < target ? lo : hi) = mid;
    }
    turns = 0.5 * (lo + hi);
  }
  return ConicalSpiralPath(center, radius, z_start, z_end, turns, budget);
}

Vec3 random_destination(const Workspace& workspace, std::mt19937_64& rng) {
  Vec3 p;
  for (int i = 0; i < 3; ++i) p[i] = std::uniform_real_distribution<double>(workspace.lo[i], workspace.hi[i])(rng);
  return p;
}

PolynomialTrajectory random_planner(const Vec3& current, const Workspace& workspace, const TrajectoryLimits& limits,
                                    std::mt19937_64& rng) {
  return PolynomialTrajectory::plan({current, random_destination(workspace, rng)}, limits);
}

}  // namespace ipp
