#include "ipp/experiment.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

namespace ipp {

std::string git_blob_sha1(std::string_view content) {
  std::string data = "blob " + std::to_string(content.size());
  data.push_back('\0');
  data.append(content);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 computation failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

TrialSeeds trial_seeds(std::uint64_t seed, int trial) {
  auto stream = [&](std::uint32_t id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), id};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  };
  return {stream(0), stream(1), stream(2)};
}

GroundTruthField make_field(const ExperimentConfig& config, std::uint64_t seed) {
  const auto& s = config.scenario;
  const GridGeometry geom(Vec2::Zero(), s.width, s.height, s.resolution);
  switch (s.kind) {
    case ScenarioKind::Gaussian: return generate_gaussian_field(geom, s.cluster_radius, s.value_range, seed);
    case ScenarioKind::Split: return generate_split_field(geom, s.split_threshold, seed, s.cluster_radius);
    case ScenarioKind::Binary: return generate_binary_field(geom, s.occupancy_fraction, seed, s.cluster_radius);
  }
  throw std::invalid_argument("unknown scenario kind");
}

MapBelief make_prior(const ExperimentConfig& config) {
  const auto& s = config.scenario;
  const GridGeometry geom(Vec2::Zero(), s.width, s.height, s.resolution);
  if (s.kind == ScenarioKind::Binary)
    return OccupancyMap(geom, {config.mission.planning.layer}, config.map.prior_probability, config.map.log_odds_clamp);
  return build_prior(geom, config.map.kernel, config.map.prior_mean);
}

TrialOutcome run_trial(const ExperimentConfig& config, const MapBelief& prior, int trial) {
  TrialOutcome out;
  out.trial = trial;
  out.seeds = trial_seeds(config.seed, trial);
  try {
    const GroundTruthField truth = make_field(config, out.seeds.field);
    std::mt19937_64 sensor_rng(out.seeds.sensor), planner_rng(out.seeds.planner);
    out.result = run_mission(truth, prior, config.mission, sensor_rng, planner_rng, trial);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

ExperimentResult run_experiment(ExperimentConfig config, const std::optional<std::filesystem::path>& out_dir, int jobs) {
  resolve(config);
  config.mission.planning.validate();
  if (config.source.empty()) config.source = dump_config(config);

  ExperimentResult result;
  result.config_hash = git_blob_sha1(config.source);
  const MapBelief prior = make_prior(config);
  result.trials.resize(static_cast<std::size_t>(config.trials));

  const int workers = std::clamp(jobs, 1, config.trials);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < config.trials; i = next++)
      result.trials[static_cast<std::size_t>(i)] = run_trial(config, prior, i);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<std::vector<MetricsRecord>> ok;
  for (const auto& t : result.trials)
    if (t.ok) ok.push_back(t.result.records);
  result.aggregate = aggregate(ok, config.mission.planning.budget);

  if (out_dir) {
    const std::string planner = to_string(config.mission.planner);
    const auto dir = *out_dir / planner;
    std::filesystem::create_directories(dir);
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : result.trials) {
      char name[32];
      std::snprintf(name, sizeof name, "trial_%02d.csv", t.trial);
      if (t.ok) write_metrics_csv(t.result.records, dir / name);
      trials.push_back({{"trial", t.trial},
                        {"seeds", {{"field", t.seeds.field}, {"sensor", t.seeds.sensor}, {"planner", t.seeds.planner}}},
                        {"status", t.ok ? "ok" : "failed"},
                        {"error", t.error},
                        {"csv", t.ok ? std::string(name) : std::string()},
                        {"measurements", t.result.measurements.size()},
                        {"replans", t.result.replans.size()}});
    }
    write_aggregate_csv(result.aggregate, dir / "aggregate.csv");
    nlohmann::json manifest = {{"name", config.name},
                               {"planner", planner},
                               {"csv_version", 1},
                               {"config_hash", result.config_hash},
                               {"seed", config.seed},
                               {"config", nlohmann::json::parse(dump_config(config))},
                               {"trials", trials},
                               {"aggregated_trials", ok.size()}};
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  }
  return result;
}

}  // namespace ipp
