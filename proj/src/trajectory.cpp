#include "ipp/trajectory.hpp"

#include "ipp/csv.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace ipp {
namespace {

constexpr double kTimeTol = 1e-9;

// Quintic Hermite on [0, T]: coefficients of p(tau) = sum c_k tau^k.
Eigen::Matrix<double, 6, 1> quintic(double p0, double v0, double a0, double p1, double v1, double a1, double T) {
  const double d = p1 - p0;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  Eigen::Matrix<double, 6, 1> c;
  c << p0, v0, a0 / 2.0, (20.0 * d - (8.0 * v1 + 12.0 * v0) * T - (3.0 * a0 - a1) * T2) / (2.0 * T3),
      (-30.0 * d + (14.0 * v1 + 16.0 * v0) * T + (3.0 * a0 - 2.0 * a1) * T2) / (2.0 * T4),
      (12.0 * d - 6.0 * (v1 + v0) * T + (a1 - a0) * T2) / (2.0 * T5);
  return c;
}

Eigen::Matrix<double, 6, 1> cubic(double p0, double v0, double p1, double v1, double T) {
  const double d = p1 - p0;
  Eigen::Matrix<double, 6, 1> c = Eigen::Matrix<double, 6, 1>::Zero();
  c[0] = p0;
  c[1] = v0;
  c[2] = (3.0 * d / T - 2.0 * v0 - v1) / T;
  c[3] = (-2.0 * d / T + v0 + v1) / (T * T);
  return c;
}

// Joint velocities of a clamped cubic spline (zero end velocity, C2 interior).
Eigen::VectorXd clamped_spline_velocities(const Eigen::VectorXd& p, const std::vector<double>& h) {
  const auto n = p.size();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (n <= 2) return v;
  const auto m = n - 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index j = k + 1;
    const double hl = h[static_cast<std::size_t>(j - 1)], hr = h[static_cast<std::size_t>(j)];
    a(k, k) = 2.0 * (hl + hr);
    if (k > 0) a(k, k - 1) = hr;
    if (k + 1 < m) a(k, k + 1) = hl;
    rhs[k] = 3.0 * (hr * (p[j] - p[j - 1]) / hl + hl * (p[j + 1] - p[j]) / hr);
  }
  v.segment(1, m) = a.partialPivLu().solve(rhs);
  return v;
}

}  // namespace

std::vector<TimedPose> measurement_poses(const FlightPath& path, double frequency_hz, std::size_t max_count,
                                         double phase) {
  if (!(frequency_hz > 0.0)) throw std::invalid_argument("measurement frequency must be positive");
  std::vector<TimedPose> poses;
  const double end = path.duration();
  for (std::size_t k = 0; poses.size() < max_count; ++k) {
    const double t = phase + static_cast<double>(k) / frequency_hz;
    if (t > end + kTimeTol) break;
    const double tc = std::min(t, end);
    poses.push_back({tc, path.position(tc)});
  }
  return poses;
}

double trapezoidal_duration(double distance, double v_max, double a_max) {
  if (!(v_max > 0.0) || !(a_max > 0.0)) throw std::invalid_argument("velocity and acceleration limits must be positive");
  if (distance <= 0.0) return kMinSegmentDuration;
  const double ramp = v_max * v_max / a_max;  // distance spent accelerating and braking at full cruise
  const double t = distance >= ramp ? distance / v_max + v_max / a_max : 2.0 * std::sqrt(distance / a_max);
  return std::max(t, kMinSegmentDuration);
}

double straight_line_time(const Vec3& from, const Vec3& to, double v_max) { return (to - from).norm() / v_max; }

PolynomialTrajectory PolynomialTrajectory::plan(std::vector<Vec3> waypoints, const TrajectoryLimits& limits) {
  if (waypoints.size() < 2) throw std::invalid_argument("a trajectory needs at least two waypoints");
  if (limits.order < 3) throw std::invalid_argument("polynomial order must be at least 3");
  if (!(limits.v_max > 0.0) || !(limits.a_max > 0.0))
    throw std::invalid_argument("velocity and acceleration limits must be positive");

  PolynomialTrajectory traj;
  traj.waypoints_ = std::move(waypoints);
  traj.limits_ = limits;
  std::vector<double> durations;
  for (std::size_t i = 0; i + 1 < traj.waypoints_.size(); ++i)
    durations.push_back(
        trapezoidal_duration((traj.waypoints_[i + 1] - traj.waypoints_[i]).norm(), limits.v_max, limits.a_max));
  traj.build(durations);

  // Joint velocities scale with 1/stretch, so one uniform stretch lands the
  // peak exactly on v_max. Repeat once in case sampling missed the true peak.
  for (int pass = 0; pass < 3; ++pass) {
    const double peak = traj.max_sampled_speed();
    if (peak <= 1.1 * limits.v_max) break;
    const double stretch = peak / limits.v_max;
    for (double& d : durations) d *= stretch;
    traj.build(durations);
  }
  return traj;
}

void PolynomialTrajectory::build(const std::vector<double>& durations) {
  durations_ = durations;
  total_duration_ = 0.0;
  for (double d : durations_) total_duration_ += d;

  const std::size_t n = waypoints_.size();
  const std::size_t segs = n - 1;
  segments_.assign(segs, Coeffs::Zero());

  for (int axis = 0; axis < 3; ++axis) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) p[static_cast<Eigen::Index>(i)] = waypoints_[i][axis];

    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (limits_.order >= 5) {
      for (std::size_t j = 1; j + 1 < n; ++j) {
        const auto ji = static_cast<Eigen::Index>(j);
        const double ml = (p[ji] - p[ji - 1]) / durations_[j - 1];
        const double mr = (p[ji + 1] - p[ji]) / durations_[j];
        v[ji] = ml * mr > 0.0 ? 0.5 * (ml + mr) : 0.0;
      }
    } else {
      v = clamped_spline_velocities(p, durations_);
    }

    for (std::size_t s = 0; s < segs; ++s) {
      const auto si = static_cast<Eigen::Index>(s);
      segments_[s].row(axis) = (limits_.order >= 5 ? quintic(p[si], v[si], 0.0, p[si + 1], v[si + 1], 0.0, durations_[s])
                                                   : cubic(p[si], v[si], p[si + 1], v[si + 1], durations_[s]))
                                   .transpose();
    }
  }
}

Vec3 PolynomialTrajectory::evaluate(double t, int derivative) const {
  t = std::clamp(t, 0.0, total_duration_);
  std::size_t s = 0;
  double start = 0.0;
  while (s + 1 < durations_.size() && t > start + durations_[s]) {
    start += durations_[s];
    ++s;
  }
  const double tau = std::clamp(t - start, 0.0, durations_[s]);
  const Coeffs& c = segments_[s];
  Vec3 out = Vec3::Zero();
  // Horner on the derivative polynomial.
  for (int k = 5; k >= derivative; --k) {
    double factor = 1.0;
    for (int j = 0; j < derivative; ++j) factor *= static_cast<double>(k - j);
    out = out * tau + factor * c.col(k);
  }
  return out;
}

double PolynomialTrajectory::max_sampled_speed() const {
  constexpr int kSamples = 64;
  double peak = 0.0;
  double start = 0.0;
  for (double d : durations_) {
    for (int i = 0; i <= kSamples; ++i) peak = std::max(peak, velocity(start + d * i / kSamples).norm());
    start += d;
  }
  return peak;
}

std::vector<double> PolynomialTrajectory::knot_times() const {
  std::vector<double> t{0.0};
  for (double d : durations_) t.push_back(t.back() + d);
  return t;
}

double cost(const PolynomialTrajectory& trajectory) {
  double c = 0.0;
  for (double d : trajectory.segment_durations()) c += d;
  return c;
}

PolylinePath::PolylinePath(std::vector<Vec3> points, double duration) : points_(std::move(points)), duration_(duration) {
  if (points_.empty()) throw std::invalid_argument("polyline needs at least one point");
  if (duration < 0.0) throw std::invalid_argument("polyline duration must be non-negative");
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) cumulative_.push_back(cumulative_.back() + (points_[i] - points_[i - 1]).norm());
}

Vec3 PolylinePath::position(double t) const {
  if (duration_ <= 0.0 || length() <= 0.0) return points_.front();
  const double s = std::clamp(t / duration_, 0.0, 1.0) * length();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  if (it == cumulative_.end()) return points_.back();
  const auto i = static_cast<std::size_t>(it - cumulative_.begin());
  const double seg = cumulative_[i] - cumulative_[i - 1];
  const double f = seg > 0.0 ? (s - cumulative_[i - 1]) / seg : 0.0;
  return points_[i - 1] + f * (points_[i] - points_[i - 1]);
}

ConicalSpiralPath::ConicalSpiralPath(Vec2 center, double base_radius, double z_start, double z_end, double turns,
                                     double duration)
    : center_(std::move(center)),
      base_radius_(base_radius),
      z_start_(z_start),
      z_end_(z_end),
      turns_(turns),
      duration_(duration) {
  if (base_radius < 0.0 || turns < 0.0 || !(duration > 0.0)) throw std::invalid_argument("invalid spiral parameters");
  constexpr int kTable = 20000;
  arc_.resize(kTable + 1);
  arc_[0] = 0.0;
  Vec3 prev = at_parameter(0.0);
  for (int i = 1; i <= kTable; ++i) {
    const Vec3 cur = at_parameter(static_cast<double>(i) / kTable);
    arc_[static_cast<std::size_t>(i)] = arc_[static_cast<std::size_t>(i - 1)] + (cur - prev).norm();
    prev = cur;
  }
}

Vec3 ConicalSpiralPath::at_parameter(double u) const {
  const double r = base_radius_ * (1.0 - u);
  const double theta = 2.0 * std::numbers::pi * turns_ * u;
  return Vec3(center_.x() + r * std::cos(theta), center_.y() + r * std::sin(theta), z_start_ + (z_end_ - z_start_) * u);
}

double ConicalSpiralPath::radius_at_altitude(double z) const {
  const double u = std::clamp((z - z_start_) / (z_end_ - z_start_), 0.0, 1.0);
  return base_radius_ * (1.0 - u);
}

Vec3 ConicalSpiralPath::position(double t) const {
  const double s = std::clamp(t / duration_, 0.0, 1.0) * length();
  const auto it = std::lower_bound(arc_.begin(), arc_.end(), s);
  if (it == arc_.begin()) return at_parameter(0.0);
  if (it == arc_.end()) return at_parameter(1.0);
  const auto i = static_cast<std::size_t>(it - arc_.begin());
  const double seg = arc_[i] - arc_[i - 1];
  const double f = seg > 0.0 ? (s - arc_[i - 1]) / seg : 0.0;
  const double n = static_cast<double>(arc_.size() - 1);
  return at_parameter((static_cast<double>(i - 1) + f) / n);
}

double ConicalSpiralPath::helix_length(double base_radius, double z_start, double z_end, double turns) {
  // ds/du = sqrt(R^2 + (2 pi T R (1-u))^2 + dz^2); Simpson on a fine grid.
  constexpr int kSteps = 4000;
  const double w = 2.0 * std::numbers::pi * turns * base_radius;
  const double dz = z_end - z_start;
  auto speed = [&](double u) {
    const double tang = w * (1.0 - u);
    return std::sqrt(base_radius * base_radius + tang * tang + dz * dz);
  };
  double sum = speed(0.0) + speed(1.0);
  for (int i = 1; i < kSteps; ++i) sum += (i % 2 ? 4.0 : 2.0) * speed(static_cast<double>(i) / kSteps);
  return sum / (3.0 * kSteps);
}

void save_path_samples_csv(const FlightPath& path, double dt, const std::filesystem::path& file) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample interval must be positive");
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << "t,x,y,z\n";
  auto row = [&](double t) {
    const Vec3 p = path.position(t);
    out << csv::format(t) << ',' << csv::format(p.x()) << ',' << csv::format(p.y()) << ',' << csv::format(p.z()) << '\n';
  };
  const auto steps = static_cast<long>(std::floor(path.duration() / dt));
  for (long k = 0; k <= steps; ++k) row(static_cast<double>(k) * dt);
  if (static_cast<double>(steps) * dt < path.duration()) row(path.duration());
}

}  // namespace ipp
