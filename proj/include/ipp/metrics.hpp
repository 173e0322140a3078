#pragma once

#include "ipp/gp_map.hpp"
#include "ipp/grid.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace ipp {

/// Root-mean-square difference between an estimate and the truth, both
/// given per cell. Throws std::invalid_argument on a size mismatch.
double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

/// Per-cell weights truth_i / max(truth), rescaled to mean 1. Uniform when
/// the truth has no positive entry.
Eigen::VectorXd value_weights(const Eigen::VectorXd& truth);

double wrmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

/// Mean negative log predictive density of the truth under the map's
/// per-cell Gaussian. Throws NumericalError on a non-positive variance.
double mll(const GPFieldMap& map, const Eigen::VectorXd& truth);
double wmll(const GPFieldMap& map, const Eigen::VectorXd& truth);

/// (mean var outside X_I - mean var inside X_I) / mean var outside X_I.
/// NaN when either side of the partition is empty.
double delta_sigma2(const Eigen::VectorXd& variances, const CellSet& interesting);

struct MetricsRecord {
  double t = 0.0;
  int measurements = 0;
  double uncertainty = 0.0;  // Tr(P) for continuous maps, entropy (bits) for occupancy maps
  double rmse = 0.0;
  double wrmse = 0.0;
  double mll = 0.0;           // NaN for occupancy maps
  double wmll = 0.0;          // NaN for occupancy maps
  double delta_sigma2 = 0.0;  // NaN when undefined
  int trial = 0;
  std::string planner;
};

/// Metric columns shared by the per-trial and aggregate CSVs.
const std::vector<std::string>& metric_names();
double metric_value(const MetricsRecord& r, const std::string& name);

/// "t,measurements,uncertainty,rmse,wrmse,mll,wmll,delta_sigma2,trial,planner"
void write_metrics_csv(const std::vector<MetricsRecord>& records, const std::filesystem::path& path);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

/// Value of the last record with t <= time (step-function semantics), or the
/// first record if every record is later.
const MetricsRecord& record_at(const std::vector<MetricsRecord>& trial, double time);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;  // NaN with fewer than two samples
  int count = 0;
};

/// Sample mean and two-sided Student-t confidence half-width. NaN samples are
/// ignored.
MeanCi mean_confidence(const std::vector<double>& samples, double level = 0.95);

struct AggregateRow {
  double t = 0.0;
  std::vector<MeanCi> metrics;  // in metric_names() order
};

/// Per-time-bin statistics over trials, bins at 0, bin, 2 bin, ... <= horizon.
std::vector<AggregateRow> aggregate(const std::vector<std::vector<MetricsRecord>>& trials, double horizon,
                                    double bin = 1.0, double level = 0.95);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);

struct WelchResult {
  double t_statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;  // one-sided, H1: mean(a) > mean(b)
  bool significant = false;
};

/// One-sided Welch t-test that mean(a) exceeds mean(b).
WelchResult welch_greater(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.05);

}  // namespace ipp
