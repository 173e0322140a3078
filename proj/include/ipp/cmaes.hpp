#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace ipp {

struct CmaConfig {
  int population_size = 0;  // 0 selects 4 + floor(3 ln d)
  Eigen::VectorXd initial_step_sizes;
  int max_iterations = 45;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument if the configuration does not fit dimension d.
  void validate(Eigen::Index d) const;
  int lambda(Eigen::Index d) const;
};

struct CmaResult {
  Eigen::VectorXd x;
  double score = 0.0;
  int evaluations = 0;  // objective calls after the initial x0 evaluation
  int iterations = 0;
  std::vector<double> best_history;  // best score after each iteration
};

using CmaObjective = std::function<double(const Eigen::VectorXd&)>;

/// (mu/mu_w, lambda) CMA-ES maximising `objective` inside a box.
///
/// Samples outside the box are clipped before evaluation and ranked with a
/// quadratic penalty on the clipping distance. Non-finite scores count as
/// -inf. Returns the best clipped point seen, x0 included.
CmaResult maximize(const CmaObjective& objective, const Eigen::VectorXd& x0, const CmaConfig& config,
                   const std::optional<std::filesystem::path>& trace_csv = std::nullopt);

}  // namespace ipp
