#pragma once

#include "ipp/grid.hpp"
#include "ipp/sensor.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ipp {

/// Isotropic Matern 3/2 covariance with additive-noise hyperparameter.
struct MaternKernel {
  double sigma_f2 = 1.82;
  double length_scale = 3.67;
  double sigma_n2 = 1.42;

  void validate() const;
};

double matern32(double distance, const MaternKernel& kernel);

/// K(X, X) over all cell centers of a grid.
Eigen::MatrixXd kernel_matrix(const GridGeometry& geometry, const MaternKernel& kernel);

/// Gaussian belief over every cell of a fixed grid: mean vector and dense
/// covariance. The covariance is kept exactly symmetric after each update.
struct GPFieldMap {
  GridGeometry geometry;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  double variance(CellIndex i) const { return cov(i, i); }
};

/// Cholesky factorisation that retries with diagonal jitter 1e-10 .. 1e-6
/// (relative to the mean diagonal) before giving up with NumericalError.
Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::MatrixXd& a, const std::string& context);

/// Prior map: uniform mean and the self-prediction GP posterior covariance
///   P = K - K (K + sigma_n^2 I)^-1 K.
GPFieldMap build_prior(const GridGeometry& geometry, const MaternKernel& kernel, double prior_mean);

/// Dense measurement matrix: row i holds 1/|cells_i| on the member cells.
Eigen::MatrixXd measurement_matrix(const GridGeometry& geometry, std::span<const MeasurementBlock> rows);

/// Kalman update with block-average measurements (mean and covariance).
void fuse_in_place(GPFieldMap& map, std::span<const MeasurementBlock> rows);
GPFieldMap fuse(const GPFieldMap& map, const MeasurementPatch& patch);

/// Covariance-only update (zero innovation: the predicted reading equals H mu).
void predict_in_place(GPFieldMap& map, std::span<const MeasurementBlock> rows);
GPFieldMap predict_continuous_update(const GPFieldMap& map, const Vec3& pose, const CameraConfig& camera,
                                     const ContinuousSensorModel& model);

/// Sum of marginal variances over `subset` (all cells when null).
double trace_uncertainty(const GPFieldMap& map, const CellSet* subset = nullptr);

/// Cells with mean + beta * stddev >= mu_th.
CellSet interesting_cells_continuous(const GPFieldMap& map, double mu_th, double beta);

/// Tr_subset(P) - Tr_subset(P+) after jointly fusing every row, computed in
/// batch without forming P+. Rows covering identical cell sets are merged by
/// adding their information. Equals the gain of fusing the rows one patch at
/// a time.
double trace_reduction(const GPFieldMap& map, std::span<const MeasurementBlock> rows, const CellSet* subset = nullptr);

/// Single-precision trace_reduction against one fixed map, for ranking many
/// candidate measurement sets quickly. Relative error is around 1e-5; falls
/// back to the double-precision path if the factorisation fails.
class ApproxTraceReduction {
 public:
  ApproxTraceReduction(const GPFieldMap& map, const CellSet* subset = nullptr);
  double operator()(std::span<const MeasurementBlock> rows) const;

 private:
  const GPFieldMap* map_;
  std::optional<CellSet> subset_;
  Eigen::MatrixXf cov_;
};

/// Merges rows that cover identical cell sets (1/r adds up).
std::vector<MeasurementBlock> merge_duplicate_rows(std::span<const MeasurementBlock> rows);

/// Writes "cell,row,col,mean,variance" for every cell.
void save_gp_map_csv(const GPFieldMap& map, const std::filesystem::path& path);

}  // namespace ipp
