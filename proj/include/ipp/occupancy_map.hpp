#pragma once

#include "ipp/grid.hpp"
#include "ipp/sensor.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipp {

/// Multi-layer occupancy grid. Each layer stores natural-log odds per cell;
/// layers are independent (no cross-layer normalisation).
class OccupancyMap {
 public:
  OccupancyMap() = default;
  OccupancyMap(GridGeometry geometry, const std::vector<std::string>& layers, double prior_probability = 0.5,
               std::optional<double> clamp_log_odds = std::nullopt);

  const GridGeometry& geometry() const { return geometry_; }
  double prior_log_odds() const { return prior_log_odds_; }
  std::vector<std::string> layer_names() const;
  bool has_layer(const std::string& name) const { return layers_.count(name) != 0; }

  const Eigen::VectorXd& log_odds(const std::string& layer) const;
  Eigen::VectorXd& log_odds(const std::string& layer);
  double probability(const std::string& layer, CellIndex cell) const;
  Eigen::VectorXd probabilities(const std::string& layer) const;

  /// Adds `delta` to a cell, honouring the optional clamp.
  void add_log_odds(const std::string& layer, CellIndex cell, double delta);

 private:
  GridGeometry geometry_;
  std::map<std::string, Eigen::VectorXd> layers_;
  double prior_log_odds_ = 0.0;
  std::optional<double> clamp_;
};

double log_odds_to_probability(double l);
double probability_to_log_odds(double p);

/// Binary entropy in bits of a single Bernoulli(p).
double binary_entropy_bits(double p);

/// Additive log-odds update L += ln(P(z|1,h) / P(z|0,h)) for every observed cell.
void update_discrete(OccupancyMap& map, const std::string& layer, const std::vector<LabelObservation>& patch,
                     double altitude, const BinaryClassifierModel& model);

/// Sum of per-cell binary entropies (bits) over `subset`, or the whole layer.
double entropy(const OccupancyMap& map, const std::string& layer, const CellSet* subset = nullptr);

/// Cells with p > p_th.
CellSet interesting_cells_discrete(const OccupancyMap& map, const std::string& layer, double p_th);

/// In-place most-likely-state update: every footprint cell is assumed to
/// re-observe its current MAP label (occupied iff p >= 0.5).
void apply_predicted_discrete_update(OccupancyMap& map, const std::string& layer, const Vec3& pose,
                                     const CameraConfig& camera, const BinaryClassifierModel& model);

OccupancyMap predict_discrete_update(const OccupancyMap& map, const std::string& layer, const Vec3& pose,
                                     const CameraConfig& camera, const BinaryClassifierModel& model);

void save_layer_csv(const OccupancyMap& map, const std::string& layer, const std::filesystem::path& path);

}  // namespace ipp
