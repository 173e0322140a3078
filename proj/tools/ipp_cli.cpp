#include "ipp/config.hpp"
#include "ipp/experiment.hpp"
#include "ipp/planner.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<int> trials,
                std::optional<std::string> planner, const std::string& out, int jobs) {
  ipp::ExperimentConfig config = ipp::load_config(config_path);
  if (seed) config.seed = *seed;
  if (trials) config.trials = *trials;
  if (planner) config.mission.planner = ipp::planner_kind_from_string(*planner);
  if (seed || trials || planner) config.source = ipp::dump_config(config);

  const auto result = ipp::run_experiment(config, std::filesystem::path(out), jobs);
  int failed = 0;
  for (const auto& t : result.trials) {
    if (t.ok) {
      const auto& last = t.result.records.back();
      std::printf("trial %02d  measurements %3zu  final uncertainty %.6g  rmse %.6g\n", t.trial,
                  t.result.measurements.size(), last.uncertainty, last.rmse);
    } else {
      ++failed;
      std::printf("trial %02d  FAILED: %s\n", t.trial, t.error.c_str());
    }
  }
  std::printf("config hash %s; outputs in %s/%s\n", result.config_hash.c_str(), out.c_str(),
              ipp::to_string(config.mission.planner).c_str());
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Informative path planning simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the trials described by a config file");
  std::string config_path, out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> planner;
  int jobs = 1;
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the experiment seed");
  run->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
  run->add_option("--planner", planner, "Override the planner (cmaes, lattice, lawnmower, spiral, random)");
  run->add_option("-o,--out", out, "Output directory")->capture_default_str();
  run->add_option("-j,--jobs", jobs, "Trials run in parallel")->check(CLI::PositiveNumber)->capture_default_str();

  auto* gen = app.add_subcommand("generate-field", "Write the ground-truth field of one trial as CSV");
  std::string gen_config, gen_out = "field.csv";
  int gen_trial = 0;
  gen->add_option("config", gen_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--trial", gen_trial, "Trial index")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Output CSV")->capture_default_str();

  auto* lat = app.add_subcommand("lattice", "Print the planning lattice of a config as CSV");
  std::string lat_config;
  lat->add_option("config", lat_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, seed, trials, planner, out, jobs);
    if (*gen) {
      const auto config = ipp::load_config(gen_config);
      const auto seeds = ipp::trial_seeds(config.seed, gen_trial);
      ipp::save_field_csv(ipp::make_field(config, seeds.field), gen_out);
      std::printf("wrote %s\n", gen_out.c_str());
      return 0;
    }
    if (*lat) {
      const auto config = ipp::load_config(lat_config);
      const auto& pc = config.mission.planning;
      const auto lattice = ipp::build_lattice(pc.workspace, pc.lattice_points, pc.camera);
      std::printf("x,y,z\n");
      for (const auto& p : lattice.points) std::printf("%.6g,%.6g,%.6g\n", p.x(), p.y(), p.z());
      return 0;
    }
  } catch (const ipp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
