#pragma once

#include "ipp/grid.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <limits>
#include <vector>

namespace ipp {

/// Anything the vehicle can fly: a time-parameterised position on [0, duration].
class FlightPath {
 public:
  virtual ~FlightPath() = default;
  virtual double duration() const = 0;
  virtual Vec3 position(double t) const = 0;
};

struct TimedPose {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
};

/// Poses at t = phase, phase + 1/f, ... up to the path end, at most
/// `max_count` of them. With phase 0 the first pose is the path start.
std::vector<TimedPose> measurement_poses(const FlightPath& path, double frequency_hz,
                                         std::size_t max_count = std::numeric_limits<std::size_t>::max(),
                                         double phase = 0.0);

/// Shortest zero-length segment duration (s).
inline constexpr double kMinSegmentDuration = 0.01;

/// Rest-to-rest time for a straight move under a trapezoidal (or triangular)
/// velocity profile, floored at kMinSegmentDuration.
double trapezoidal_duration(double distance, double v_max, double a_max);

/// Constant-velocity straight-line travel time.
double straight_line_time(const Vec3& from, const Vec3& to, double v_max);

struct TrajectoryLimits {
  double v_max = 5.0;
  double a_max = 2.0;
  int order = 12;
};

/// Piecewise polynomial through N control waypoints.
///
/// Every axis is interpolated independently. With order >= 5 each segment is
/// a quintic Hermite polynomial: zero velocity and acceleration at both ends
/// of the trajectory, and at interior joints a shared velocity (the mean of
/// the adjacent segment slopes when they agree in sign, else zero) and zero
/// acceleration, which gives C2 continuity. Orders 3 and 4 fall back to a
/// clamped cubic spline (C2, zero end velocity). Segment durations come from
/// the trapezoidal profile and are stretched uniformly if any sampled speed
/// exceeds 1.1 v_max.
class PolynomialTrajectory : public FlightPath {
 public:
  static PolynomialTrajectory plan(std::vector<Vec3> waypoints, const TrajectoryLimits& limits);

  double duration() const override { return total_duration_; }
  Vec3 position(double t) const override { return evaluate(t, 0); }
  Vec3 velocity(double t) const { return evaluate(t, 1); }
  Vec3 acceleration(double t) const { return evaluate(t, 2); }

  const std::vector<Vec3>& waypoints() const { return waypoints_; }
  const std::vector<double>& segment_durations() const { return durations_; }
  /// Start time of each waypoint (knot times), size N.
  std::vector<double> knot_times() const;
  const TrajectoryLimits& limits() const { return limits_; }

 private:
  using Coeffs = Eigen::Matrix<double, 3, 6>;  // row = axis, col = power of local time

  void build(const std::vector<double>& durations);
  Vec3 evaluate(double t, int derivative) const;
  double max_sampled_speed() const;

  std::vector<Vec3> waypoints_;
  std::vector<double> durations_;
  std::vector<Coeffs> segments_;
  TrajectoryLimits limits_;
  double total_duration_ = 0.0;
};

/// Travel time of a planned trajectory (sum of segment durations).
double cost(const PolynomialTrajectory& trajectory);

/// Constant-speed traversal of a polyline over a fixed duration.
class PolylinePath : public FlightPath {
 public:
  PolylinePath(std::vector<Vec3> points, double duration);

  double duration() const override { return duration_; }
  Vec3 position(double t) const override;
  double length() const { return cumulative_.back(); }
  double speed() const { return duration_ > 0.0 ? length() / duration_ : 0.0; }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  std::vector<Vec3> points_;
  std::vector<double> cumulative_;
  double duration_;
};

/// Conical helix around a vertical axis. Radius shrinks linearly from
/// `base_radius` at `z_start` to zero at `z_end`; flown at constant speed.
class ConicalSpiralPath : public FlightPath {
 public:
  ConicalSpiralPath(Vec2 center, double base_radius, double z_start, double z_end, double turns, double duration);

  double duration() const override { return duration_; }
  Vec3 position(double t) const override;
  double length() const { return arc_.back(); }
  double turns() const { return turns_; }
  double radius_at_altitude(double z) const;

  /// Arc length of a helix with the given geometry.
  static double helix_length(double base_radius, double z_start, double z_end, double turns);

 private:
  Vec3 at_parameter(double u) const;

  Vec2 center_;
  double base_radius_, z_start_, z_end_, turns_, duration_;
  std::vector<double> arc_;  // cumulative length at u = i / (arc_.size() - 1)
};

/// Samples (t, x, y, z) every `dt` seconds, plus the end point.
void save_path_samples_csv(const FlightPath& path, double dt, const std::filesystem::path& file);

}  // namespace ipp
