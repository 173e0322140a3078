#pragma once

#include "ipp/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ipp {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class FieldKind { Continuous, Binary };

/// Dense ground-truth raster the simulator measures against.
/// Continuous fields hold percentages in [0, 100]; binary fields hold {0, 1}.
struct GroundTruthField {
  GridGeometry geometry;
  Eigen::VectorXd values;  // row-major, one entry per cell
  std::uint64_t seed = 0;
  FieldKind kind = FieldKind::Continuous;

  double at(int row, int col) const { return values[geometry.index(row, col)]; }
};

/// Sum of randomly placed isotropic Gaussian bumps, rescaled so the observed
/// minimum and maximum land exactly on `value_range`.
GroundTruthField generate_gaussian_field(const GridGeometry& geometry, Interval cluster_radius,
                                         Interval value_range, std::uint64_t seed);

/// Two-zone field split along x. Columns [0, cols/2) lie strictly below
/// `threshold`; the remaining columns (the extra one when cols is odd) lie at
/// or above it.
GroundTruthField generate_split_field(const GridGeometry& geometry, double threshold, std::uint64_t seed,
                                      Interval cluster_radius = {1.0, 3.0});

/// Blob-shaped occupancy raster: the round(fraction * n) highest cells of a
/// smooth random field are marked 1.
GroundTruthField generate_binary_field(const GridGeometry& geometry, double occupancy_fraction,
                                       std::uint64_t seed, Interval cluster_radius = {1.0, 3.0});

/// One line per grid row, comma-separated, shortest round-trip formatting.
void save_field_csv(const GroundTruthField& field, const std::filesystem::path& path);
GroundTruthField load_field_csv(const std::filesystem::path& path, const GridGeometry& geometry,
                                FieldKind kind = FieldKind::Continuous);

/// Writes an arbitrary per-cell vector in the same row layout.
void save_grid_csv(const GridGeometry& geometry, const Eigen::VectorXd& values,
                   const std::filesystem::path& path);

}  // namespace ipp
