#pragma once

#include "ipp/field.hpp"
#include "ipp/grid.hpp"

#include <limits>
#include <random>
#include <vector>

namespace ipp {

/// Nadir-pointing camera. Field-of-view angles are full angles in degrees.
struct CameraConfig {
  double fov_x_deg = 60.0;
  double fov_y_deg = 60.0;
  double frequency_hz = 0.15;

  void validate() const;
  /// Ground half-extents (x, y) of the footprint at altitude h.
  Vec2 half_extent(double altitude) const;
};

/// Cells whose centers fall inside the ground-projected footprint at `pose`,
/// clipped to the grid. Throws std::invalid_argument for a pose below ground.
CellRect footprint_rect(const Vec3& pose, const CameraConfig& camera, const GridGeometry& geometry);
CellSet footprint(const Vec3& pose, const CameraConfig& camera, const GridGeometry& geometry);

/// Altitude-dependent binary classifier, tabulated as linearly interpolated
/// knots of P(z=1 | occupied, h) and P(z=1 | free, h).
struct BinaryClassifierModel {
  std::vector<double> altitudes;      // strictly increasing knot altitudes (m)
  std::vector<double> true_positive;  // P(z=1 | cell=1, h)
  std::vector<double> false_positive; // P(z=1 | cell=0, h)

  /// Curves that start near-perfect at ground level and flatten towards 0.5
  /// at 30 m.
  static BinaryClassifierModel default_model();

  void validate() const;
  double min_altitude() const { return altitudes.front(); }
  double max_altitude() const { return altitudes.back(); }
  double tp(double h) const;
  double fp(double h) const;
};

/// P(z | cell, h). Throws std::out_of_range outside the tabulated altitudes.
double classifier_likelihood(double altitude, int cell_state, int observed_label,
                             const BinaryClassifierModel& model);

struct ResolutionBand {
  double upper_altitude;  // band covers [previous upper, upper); +inf for the top band
  double scale;           // s_f in (0, 1]; 1/s_f must be an integer
};

/// Gaussian sensor whose noise variance grows as a (1 - exp(-b h)) and whose
/// resolution drops in discrete altitude bands.
struct ContinuousSensorModel {
  double a = 0.2;
  double b = 0.05;
  std::vector<ResolutionBand> bands{{10.0, 1.0}, {std::numeric_limits<double>::infinity(), 0.5}};

  void validate() const;
};

double noise_variance(double altitude, const ContinuousSensorModel& model);
double resolution_scale(double altitude, const ContinuousSensorModel& model);
/// Side length, in cells, of the block aggregated by one measurement (1/s_f).
int block_size(double altitude, const ContinuousSensorModel& model);

/// One low-resolution sample: z ~ N(mean of member cells, variance).
struct MeasurementBlock {
  double value = 0.0;
  CellSet cells;
  double variance = 0.0;
};

struct MeasurementPatch {
  std::vector<MeasurementBlock> blocks;
  double altitude = 0.0;
  double scale = 1.0;
};

/// Partition of a footprint into square blocks of `block` cells per side,
/// anchored at the footprint's low corner. Partial edge blocks are dropped.
std::vector<CellSet> partition_footprint(const CellRect& rect, int block, const GridGeometry& geometry);

/// Noise-free measurement layout at `pose`: block cell sets and variances,
/// values left at zero. Shared by simulation and planning-time prediction.
MeasurementPatch measurement_layout(const Vec3& pose, const CameraConfig& camera,
                                    const ContinuousSensorModel& model, const GridGeometry& geometry);

MeasurementPatch simulate_continuous_measurement(const Vec3& pose, const CameraConfig& camera,
                                                 const ContinuousSensorModel& model,
                                                 const GroundTruthField& truth, std::mt19937_64& rng);

struct LabelObservation {
  CellIndex cell;
  int label;
};

/// Samples a class label for each footprint cell from the classifier curves
/// at the pose altitude.
std::vector<LabelObservation> simulate_binary_measurement(const Vec3& pose, const CameraConfig& camera,
                                                          const BinaryClassifierModel& model,
                                                          const GroundTruthField& truth, std::mt19937_64& rng);

}  // namespace ipp
