#include "ipp/occupancy_map.hpp"

#include "ipp/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ipp {

OccupancyMap::OccupancyMap(GridGeometry geometry, const std::vector<std::string>& layers, double prior_probability,
                           std::optional<double> clamp_log_odds)
    : geometry_(std::move(geometry)), clamp_(clamp_log_odds) {
  if (!(prior_probability > 0.0 && prior_probability < 1.0))
    throw std::invalid_argument("prior occupancy probability must lie in (0, 1)");
  if (layers.empty()) throw std::invalid_argument("occupancy map needs at least one layer");
  if (clamp_ && !(*clamp_ > 0.0)) throw std::invalid_argument("log-odds clamp bound must be positive");
  prior_log_odds_ = probability_to_log_odds(prior_probability);
  for (const auto& name : layers) layers_[name] = Eigen::VectorXd::Constant(geometry_.size(), prior_log_odds_);
}

std::vector<std::string> OccupancyMap::layer_names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : layers_) names.push_back(name);
  return names;
}

const Eigen::VectorXd& OccupancyMap::log_odds(const std::string& layer) const {
  const auto it = layers_.find(layer);
  if (it == layers_.end()) throw std::invalid_argument("unknown occupancy layer '" + layer + "'");
  return it->second;
}

Eigen::VectorXd& OccupancyMap::log_odds(const std::string& layer) {
  const auto it = layers_.find(layer);
  if (it == layers_.end()) throw std::invalid_argument("unknown occupancy layer '" + layer + "'");
  return it->second;
}

double OccupancyMap::probability(const std::string& layer, CellIndex cell) const {
  return log_odds_to_probability(log_odds(layer)[cell]);
}

Eigen::VectorXd OccupancyMap::probabilities(const std::string& layer) const {
  return log_odds(layer).unaryExpr([](double l) { return log_odds_to_probability(l); });
}

void OccupancyMap::add_log_odds(const std::string& layer, CellIndex cell, double delta) {
  double& l = log_odds(layer)[cell];
  l += delta;
  if (clamp_) l = std::clamp(l, -*clamp_, *clamp_);
}

double log_odds_to_probability(double l) { return 1.0 / (1.0 + std::exp(-l)); }

double probability_to_log_odds(double p) { return std::log(p / (1.0 - p)); }

double binary_entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

void update_discrete(OccupancyMap& map, const std::string& layer, const std::vector<LabelObservation>& patch,
                     double altitude, const BinaryClassifierModel& model) {
  map.log_odds(layer);  // validates the layer name before touching anything
  const double l1 = std::log(classifier_likelihood(altitude, 1, 1, model) / classifier_likelihood(altitude, 0, 1, model));
  const double l0 = std::log(classifier_likelihood(altitude, 1, 0, model) / classifier_likelihood(altitude, 0, 0, model));
  for (const auto& obs : patch) {
    if (!map.geometry().contains(obs.cell)) throw std::invalid_argument("observation outside the map");
    map.add_log_odds(layer, obs.cell, obs.label ? l1 : l0);
  }
}

double entropy(const OccupancyMap& map, const std::string& layer, const CellSet* subset) {
  const Eigen::VectorXd& l = map.log_odds(layer);
  double h = 0.0;
  if (subset) {
    for (CellIndex c : *subset) h += binary_entropy_bits(log_odds_to_probability(l[c]));
  } else {
    for (Eigen::Index c = 0; c < l.size(); ++c) h += binary_entropy_bits(log_odds_to_probability(l[c]));
  }
  return h;
}

CellSet interesting_cells_discrete(const OccupancyMap& map, const std::string& layer, double p_th) {
  if (!(p_th >= 0.0 && p_th <= 1.0)) throw std::invalid_argument("probability threshold must lie in [0, 1]");
  const Eigen::VectorXd& l = map.log_odds(layer);
  CellSet out;
  for (Eigen::Index c = 0; c < l.size(); ++c)
    if (log_odds_to_probability(l[c]) > p_th) out.push_back(static_cast<CellIndex>(c));
  return out;
}

void apply_predicted_discrete_update(OccupancyMap& map, const std::string& layer, const Vec3& pose,
                                     const CameraConfig& camera, const BinaryClassifierModel& model) {
  const double l1 = std::log(classifier_likelihood(pose.z(), 1, 1, model) / classifier_likelihood(pose.z(), 0, 1, model));
  const double l0 = std::log(classifier_likelihood(pose.z(), 1, 0, model) / classifier_likelihood(pose.z(), 0, 0, model));
  Eigen::VectorXd& l = map.log_odds(layer);
  for (CellIndex c : footprint(pose, camera, map.geometry())) {
    // p >= 0.5 <=> L >= 0
    map.add_log_odds(layer, c, l[c] >= 0.0 ? l1 : l0);
  }
}

OccupancyMap predict_discrete_update(const OccupancyMap& map, const std::string& layer, const Vec3& pose,
                                     const CameraConfig& camera, const BinaryClassifierModel& model) {
  OccupancyMap copy = map;
  apply_predicted_discrete_update(copy, layer, pose, camera, model);
  return copy;
}

void save_layer_csv(const OccupancyMap& map, const std::string& layer, const std::filesystem::path& path) {
  save_grid_csv(map.geometry(), map.probabilities(layer), path);
}

}  // namespace ipp
