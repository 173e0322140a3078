#pragma once

#include "ipp/config.hpp"
#include "ipp/metrics.hpp"
#include "ipp/mission.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipp {

/// Git-style content hash: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_sha1(std::string_view content);

struct TrialSeeds {
  std::uint64_t field = 0;
  std::uint64_t sensor = 0;
  std::uint64_t planner = 0;
};

/// Independent per-trial streams derived from (experiment seed, trial index).
TrialSeeds trial_seeds(std::uint64_t seed, int trial);

GroundTruthField make_field(const ExperimentConfig& config, std::uint64_t seed);

/// Fresh map of the kind the scenario needs.
MapBelief make_prior(const ExperimentConfig& config);

struct TrialOutcome {
  int trial = 0;
  TrialSeeds seeds;
  bool ok = false;
  std::string error;
  MissionResult result;
};

/// Runs a single trial; failures are captured in the outcome, not thrown.
/// `prior` is copied, so one prior can serve every trial.
TrialOutcome run_trial(const ExperimentConfig& config, const MapBelief& prior, int trial);

struct ExperimentResult {
  std::vector<TrialOutcome> trials;
  std::vector<AggregateRow> aggregate;  // over successful trials only
  std::string config_hash;
};

/// Runs every trial (on `jobs` worker threads). With an output directory,
/// writes <out>/<planner>/trial_XX.csv, aggregate.csv and manifest.json.
ExperimentResult run_experiment(ExperimentConfig config, const std::optional<std::filesystem::path>& out_dir,
                                int jobs = 1);

}  // namespace ipp
