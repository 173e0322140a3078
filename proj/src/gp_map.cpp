#include "ipp/gp_map.hpp"

#include "ipp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ipp {
namespace {

// Columns of P H^T: column a is the average of P's columns over row a's cells.
Eigen::MatrixXd cov_times_ht(const Eigen::MatrixXd& cov, std::span<const MeasurementBlock> rows) {
  const Eigen::Index n = cov.rows();
  Eigen::MatrixXd g(n, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto& cells = rows[a].cells;
    auto col = g.col(static_cast<Eigen::Index>(a));
    col = cov.col(cells.front());
    for (std::size_t k = 1; k < cells.size(); ++k) col += cov.col(cells[k]);
    if (cells.size() > 1) col /= static_cast<double>(cells.size());
  }
  return g;
}

// H G + R for G = P H^T, gathered from contiguous columns of G. The lower
// triangle is mirrored so S is exactly symmetric.
Eigen::MatrixXd innovation_covariance(const Eigen::MatrixXd& g, std::span<const MeasurementBlock> rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd s(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const double* ga = g.col(a).data();
    for (Eigen::Index b = a; b < m; ++b) {
      const auto& cells = rows[static_cast<std::size_t>(b)].cells;
      double v = 0.0;
      for (CellIndex c : cells) v += ga[c];
      s(b, a) = v / static_cast<double>(cells.size());
    }
    s(a, a) += rows[static_cast<std::size_t>(a)].variance;
  }
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s;
}

void check_rows(const GridGeometry& geometry, std::span<const MeasurementBlock> rows) {
  for (const auto& r : rows) {
    if (r.cells.empty()) throw std::invalid_argument("measurement block without cells");
    if (!(r.variance > 0.0)) throw std::invalid_argument("measurement variance must be positive");
    for (CellIndex c : r.cells)
      if (!geometry.contains(c)) throw std::invalid_argument("measurement block references a cell outside the map");
  }
}

// Shared Kalman step.
void kalman_step(GPFieldMap& map, std::span<const MeasurementBlock> rows, bool update_mean) {
  check_rows(map.geometry, rows);
  if (rows.empty()) return;
  Eigen::MatrixXd g = cov_times_ht(map.cov, rows);
  const Eigen::MatrixXd s = innovation_covariance(g, rows);
  const Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("innovation covariance is not positive definite");

  llt.matrixU().solveInPlace<Eigen::OnTheRight>(g);  // g <- P H^T L^-T

  if (update_mean) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      double hm = 0.0;
      for (CellIndex c : rows[a].cells) hm += map.mean[c];
      v[static_cast<Eigen::Index>(a)] = rows[a].value - hm / static_cast<double>(rows[a].cells.size());
    }
    llt.matrixL().solveInPlace(v);
    map.mean.noalias() += g * v;
  }

  map.cov.selfadjointView<Eigen::Lower>().rankUpdate(g, -1.0);
  map.cov.triangularView<Eigen::StrictlyUpper>() = map.cov.transpose();
}

}  // namespace

void MaternKernel::validate() const {
  if (!(sigma_f2 > 0.0) || !(length_scale > 0.0) || !(sigma_n2 > 0.0))
    throw std::invalid_argument("Matern kernel hyperparameters must be strictly positive");
}

double matern32(double distance, const MaternKernel& kernel) {
  if (distance < 0.0) throw std::invalid_argument("kernel distance must be non-negative");
  const double r = std::sqrt(3.0) * distance / kernel.length_scale;
  return kernel.sigma_f2 * (1.0 + r) * std::exp(-r);
}

Eigen::MatrixXd kernel_matrix(const GridGeometry& geometry, const MaternKernel& kernel) {
  const int n = geometry.size();
  Eigen::MatrixXd k(n, n);
  for (int j = 0; j < n; ++j) {
    const Vec2 cj = geometry.center(j);
    for (int i = j; i < n; ++i) {
      const double v = matern32((geometry.center(i) - cj).norm(), kernel);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::MatrixXd& a, const std::string& context) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  const double scale = std::max(a.diagonal().mean(), 1e-300);
  for (double jitter = 1e-10; jitter <= 1e-6 * (1.0 + 1e-12); jitter *= 10.0) {
    Eigen::MatrixXd b = a;
    b.diagonal().array() += jitter * scale;
    llt.compute(b);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw NumericalError("Cholesky factorisation failed (" + context + ")");
}

GPFieldMap build_prior(const GridGeometry& geometry, const MaternKernel& kernel, double prior_mean) {
  kernel.validate();
  const int n = geometry.size();
  const Eigen::MatrixXd k = kernel_matrix(geometry, kernel);
  Eigen::MatrixXd a = k;
  a.diagonal().array() += kernel.sigma_n2;

  std::ostringstream ctx;
  ctx << "prior covariance with sigma_f2=" << kernel.sigma_f2 << ", l=" << kernel.length_scale
      << ", sigma_n2=" << kernel.sigma_n2;
  const auto llt = robust_cholesky(a, ctx.str());

  Eigen::MatrixXd w = k;
  llt.matrixL().solveInPlace(w);  // L^-1 K

  GPFieldMap map;
  map.geometry = geometry;
  map.mean = Eigen::VectorXd::Constant(n, prior_mean);
  map.cov = k;
  map.cov.selfadjointView<Eigen::Lower>().rankUpdate(w.transpose(), -1.0);
  map.cov.triangularView<Eigen::StrictlyUpper>() = map.cov.transpose();
  return map;
}

Eigen::MatrixXd measurement_matrix(const GridGeometry& geometry, std::span<const MeasurementBlock> rows) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), geometry.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (CellIndex c : rows[a].cells) h(static_cast<Eigen::Index>(a), c) = 1.0 / static_cast<double>(rows[a].cells.size());
  return h;
}

void fuse_in_place(GPFieldMap& map, std::span<const MeasurementBlock> rows) { kalman_step(map, rows, true); }

GPFieldMap fuse(const GPFieldMap& map, const MeasurementPatch& patch) {
  GPFieldMap out = map;
  fuse_in_place(out, patch.blocks);
  return out;
}

void predict_in_place(GPFieldMap& map, std::span<const MeasurementBlock> rows) { kalman_step(map, rows, false); }

GPFieldMap predict_continuous_update(const GPFieldMap& map, const Vec3& pose, const CameraConfig& camera,
                                     const ContinuousSensorModel& model) {
  GPFieldMap out = map;
  predict_in_place(out, measurement_layout(pose, camera, model, map.geometry).blocks);
  return out;
}

double trace_uncertainty(const GPFieldMap& map, const CellSet* subset) {
  if (!subset) return map.cov.trace();
  double t = 0.0;
  for (CellIndex c : *subset) t += map.cov(c, c);
  return t;
}

CellSet interesting_cells_continuous(const GPFieldMap& map, double mu_th, double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  CellSet out;
  for (int i = 0; i < map.geometry.size(); ++i)
    if (map.mean[i] + beta * std::sqrt(std::max(map.cov(i, i), 0.0)) >= mu_th) out.push_back(i);
  return out;
}

std::vector<MeasurementBlock> merge_duplicate_rows(std::span<const MeasurementBlock> rows) {
  // Single-cell rows dominate; key them by cell, everything else by its sorted cell list.
  std::map<CellSet, std::size_t> index;
  std::vector<MeasurementBlock> out;
  std::vector<double> info;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    CellSet key = r.cells;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = index.try_emplace(std::move(key), out.size());
    if (inserted) {
      out.push_back(r);
      info.push_back(1.0 / r.variance);
    } else {
      info[it->second] += 1.0 / r.variance;
    }
  }
  for (std::size_t a = 0; a < out.size(); ++a) out[a].variance = 1.0 / info[a];
  return out;
}

double trace_reduction(const GPFieldMap& map, std::span<const MeasurementBlock> rows, const CellSet* subset) {
  if (rows.empty()) return 0.0;
  check_rows(map.geometry, rows);
  const std::vector<MeasurementBlock> merged = merge_duplicate_rows(rows);
  Eigen::MatrixXd g = cov_times_ht(map.cov, merged);
  const Eigen::MatrixXd s = innovation_covariance(g, merged);
  const Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("innovation covariance is not positive definite");

  // Tr_sub(P H^T S^-1 H P) = || (P H^T L^-T) restricted to subset rows ||_F^2
  if (subset) {
    Eigen::MatrixXd ge(static_cast<Eigen::Index>(subset->size()), static_cast<Eigen::Index>(merged.size()));
    for (std::size_t j = 0; j < subset->size(); ++j) ge.row(static_cast<Eigen::Index>(j)) = g.row((*subset)[j]);
    llt.matrixU().solveInPlace<Eigen::OnTheRight>(ge);
    return ge.squaredNorm();
  }
  llt.matrixU().solveInPlace<Eigen::OnTheRight>(g);
  return g.squaredNorm();
}

ApproxTraceReduction::ApproxTraceReduction(const GPFieldMap& map, const CellSet* subset)
    : map_(&map), cov_(map.cov.cast<float>()) {
  if (subset) subset_ = *subset;
}

double ApproxTraceReduction::operator()(std::span<const MeasurementBlock> rows) const {
  if (rows.empty()) return 0.0;
  check_rows(map_->geometry, rows);
  const std::vector<MeasurementBlock> merged = merge_duplicate_rows(rows);
  const Eigen::Index n = cov_.rows();
  const auto m = static_cast<Eigen::Index>(merged.size());

  Eigen::MatrixXf g(n, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& cells = merged[static_cast<std::size_t>(a)].cells;
    auto col = g.col(a);
    col = cov_.col(cells.front());
    for (std::size_t k = 1; k < cells.size(); ++k) col += cov_.col(cells[k]);
    if (cells.size() > 1) col /= static_cast<float>(cells.size());
  }
  // Lower triangle of H P H^T + R, read from contiguous columns of g.
  Eigen::MatrixXf s(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const float* ga = g.col(a).data();
    for (Eigen::Index b = a; b < m; ++b) {
      const auto& cells = merged[static_cast<std::size_t>(b)].cells;
      float v = 0.0f;
      for (CellIndex c : cells) v += ga[c];
      s(b, a) = v / static_cast<float>(cells.size());
    }
    s(a, a) += static_cast<float>(merged[static_cast<std::size_t>(a)].variance);
  }
  const Eigen::LLT<Eigen::MatrixXf, Eigen::Lower> llt(s);
  if (llt.info() != Eigen::Success) return trace_reduction(*map_, merged, subset_ ? &*subset_ : nullptr);

  if (subset_) {
    Eigen::MatrixXf ge(static_cast<Eigen::Index>(subset_->size()), m);
    for (std::size_t j = 0; j < subset_->size(); ++j) ge.row(static_cast<Eigen::Index>(j)) = g.row((*subset_)[j]);
    llt.matrixU().solveInPlace<Eigen::OnTheRight>(ge);
    return static_cast<double>(ge.squaredNorm());
  }
  llt.matrixU().solveInPlace<Eigen::OnTheRight>(g);
  return static_cast<double>(g.squaredNorm());
}

void save_gp_map_csv(const GPFieldMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "cell,row,col,mean,variance\n";
  for (int i = 0; i < map.geometry.size(); ++i)
    out << i << ',' << map.geometry.row_of(i) << ',' << map.geometry.col_of(i) << ',' << csv::format(map.mean[i]) << ','
        << csv::format(map.cov(i, i)) << '\n';
}

}  // namespace ipp
