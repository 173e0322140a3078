#include "ipp/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ipp {
namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

void CameraConfig::validate() const {
  if (!(fov_x_deg > 0.0 && fov_x_deg < 180.0) || !(fov_y_deg > 0.0 && fov_y_deg < 180.0))
    throw std::invalid_argument("camera field of view must lie in (0, 180) degrees");
  if (!(frequency_hz > 0.0)) throw std::invalid_argument("measurement frequency must be positive");
}

Vec2 CameraConfig::half_extent(double altitude) const {
  return Vec2(altitude * std::tan(deg2rad(fov_x_deg) / 2.0), altitude * std::tan(deg2rad(fov_y_deg) / 2.0));
}

CellRect footprint_rect(const Vec3& pose, const CameraConfig& camera, const GridGeometry& geometry) {
  if (pose.z() < 0.0) throw std::invalid_argument("camera pose lies below ground");
  const Vec2 half = camera.half_extent(pose.z());
  return geometry.cells_within(pose.head<2>(), half.x(), half.y());
}

CellSet footprint(const Vec3& pose, const CameraConfig& camera, const GridGeometry& geometry) {
  return geometry.cells_of(footprint_rect(pose, camera, geometry));
}

BinaryClassifierModel BinaryClassifierModel::default_model() {
  BinaryClassifierModel m;
  m.altitudes = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  m.true_positive = {0.95, 0.90, 0.83, 0.74, 0.65, 0.57, 0.51};
  m.false_positive = {0.05, 0.09, 0.15, 0.24, 0.33, 0.42, 0.49};
  return m;
}

void BinaryClassifierModel::validate() const {
  if (altitudes.size() < 2 || true_positive.size() != altitudes.size() || false_positive.size() != altitudes.size())
    throw std::invalid_argument("classifier curves need at least two knots of matching length");
  for (std::size_t i = 0; i < altitudes.size(); ++i) {
    if (i > 0 && !(altitudes[i] > altitudes[i - 1]))
      throw std::invalid_argument("classifier knot altitudes must be strictly increasing");
    const double t = true_positive[i], f = false_positive[i];
    if (!(t > 0.0 && t < 1.0 && f > 0.0 && f < 1.0))
      throw std::invalid_argument("classifier probabilities must lie in (0, 1)");
    if (t < f) throw std::invalid_argument("true-positive curve must not fall below the false-positive curve");
  }
}

double BinaryClassifierModel::tp(double h) const { return interpolate(altitudes, true_positive, h); }
double BinaryClassifierModel::fp(double h) const { return interpolate(altitudes, false_positive, h); }

double classifier_likelihood(double altitude, int cell_state, int observed_label, const BinaryClassifierModel& model) {
  if (altitude < model.min_altitude() || altitude > model.max_altitude())
    throw std::out_of_range("altitude outside the classifier's validity range");
  const double p_one = cell_state ? model.tp(altitude) : model.fp(altitude);
  return observed_label ? p_one : 1.0 - p_one;
}

void ContinuousSensorModel::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("sensor noise coefficients must be positive");
  if (bands.empty()) throw std::invalid_argument("sensor model needs at least one resolution band");
  if (bands.front().scale != 1.0) throw std::invalid_argument("lowest resolution band must have scale 1");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const double s = bands[i].scale;
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("resolution scale must lie in (0, 1]");
    const double inv = 1.0 / s;
    if (std::abs(inv - std::round(inv)) > 1e-9) throw std::invalid_argument("1/scale must be an integer");
    if (i > 0 && !(bands[i].upper_altitude > bands[i - 1].upper_altitude))
      throw std::invalid_argument("resolution band altitudes must increase");
    if (i > 0 && s > bands[i - 1].scale) throw std::invalid_argument("resolution scale must not increase with altitude");
  }
}

double noise_variance(double altitude, const ContinuousSensorModel& model) {
  if (altitude < 0.0) throw std::invalid_argument("altitude must be non-negative");
  return model.a * (1.0 - std::exp(-model.b * altitude));
}

double resolution_scale(double altitude, const ContinuousSensorModel& model) {
  for (const auto& band : model.bands)
    if (altitude < band.upper_altitude) return band.scale;
  return model.bands.back().scale;
}

int block_size(double altitude, const ContinuousSensorModel& model) {
  return static_cast<int>(std::lround(1.0 / resolution_scale(altitude, model)));
}

std::vector<CellSet> partition_footprint(const CellRect& rect, int block, const GridGeometry& geometry) {
  std::vector<CellSet> out;
  if (rect.empty() || block < 1) return out;
  const int br = rect.rows() / block, bc = rect.cols() / block;
  out.reserve(static_cast<std::size_t>(br * bc));
  for (int i = 0; i < br; ++i) {
    for (int j = 0; j < bc; ++j) {
      CellSet cells;
      cells.reserve(static_cast<std::size_t>(block * block));
      for (int r = 0; r < block; ++r)
        for (int c = 0; c < block; ++c) cells.push_back(geometry.index(rect.row_lo + i * block + r, rect.col_lo + j * block + c));
      out.push_back(std::move(cells));
    }
  }
  return out;
}

MeasurementPatch measurement_layout(const Vec3& pose, const CameraConfig& camera, const ContinuousSensorModel& model,
                                    const GridGeometry& geometry) {
  MeasurementPatch patch;
  patch.altitude = pose.z();
  patch.scale = resolution_scale(pose.z(), model);
  const double var = noise_variance(pose.z(), model);
  const int block = block_size(pose.z(), model);
  for (auto& cells : partition_footprint(footprint_rect(pose, camera, geometry), block, geometry))
    patch.blocks.push_back(MeasurementBlock{0.0, std::move(cells), var});
  return patch;
}

MeasurementPatch simulate_continuous_measurement(const Vec3& pose, const CameraConfig& camera,
                                                 const ContinuousSensorModel& model, const GroundTruthField& truth,
                                                 std::mt19937_64& rng) {
  MeasurementPatch patch = measurement_layout(pose, camera, model, truth.geometry);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto& blk : patch.blocks) {
    double mean = 0.0;
    for (CellIndex c : blk.cells) mean += truth.values[c];
    mean /= static_cast<double>(blk.cells.size());
    blk.value = mean + std::sqrt(blk.variance) * noise(rng);
  }
  return patch;
}

std::vector<LabelObservation> simulate_binary_measurement(const Vec3& pose, const CameraConfig& camera,
                                                          const BinaryClassifierModel& model,
                                                          const GroundTruthField& truth, std::mt19937_64& rng) {
  std::vector<LabelObservation> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (CellIndex c : footprint(pose, camera, truth.geometry)) {
    const int state = truth.values[c] >= 0.5 ? 1 : 0;
    const double p_one = classifier_likelihood(pose.z(), state, 1, model);
    out.push_back({c, unit(rng) < p_one ? 1 : 0});
  }
  return out;
}

}  // namespace ipp
