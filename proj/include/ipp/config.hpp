#pragma once

#include "ipp/field.hpp"
#include "ipp/gp_map.hpp"
#include "ipp/mission.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace ipp {

/// Malformed experiment configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Gaussian, Split, Binary };

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Gaussian;
  double width = 30.0;
  double height = 30.0;
  double resolution = 0.75;
  Interval cluster_radius{1.0, 3.0};
  Interval value_range{0.0, 100.0};
  double split_threshold = 40.0;
  double occupancy_fraction = 0.2;
};

struct MapConfig {
  MaternKernel kernel;
  double prior_mean = 0.5;          // map units
  double prior_probability = 0.5;   // occupancy maps
  std::optional<double> log_odds_clamp;
};

struct ExperimentConfig {
  std::string name = "experiment";
  int trials = 1;
  std::uint64_t seed = 0;
  ScenarioConfig scenario;
  MapConfig map;
  MissionConfig mission;
  double adaptive_mu_th = 40.0;  // truth units; converted into map units by resolve()
  double value_scale = 0.01;     // truth units -> map units
  double z_min = 1.0;            // flight altitude range (m)
  double z_max = 26.0;
  std::string source;  // canonical JSON text the run was configured from
};

/// Derives the dependent settings: lateral workspace from the scenario
/// area, utility mode from the scenario kind, map-unit thresholds.
void resolve(ExperimentConfig& config);

/// Parses the JSON experiment description; missing keys keep their defaults,
/// unknown keys and wrong types raise ConfigError. The result is resolved.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON dump of a parsed configuration (every field, defaults filled in).
std::string dump_config(const ExperimentConfig& config);

}  // namespace ipp
