#pragma once

// Independent dense reference computations used by the unit and acceptance
// tests. Nothing here calls into the library's linear algebra.

#include "ipp/grid.hpp"
#include "ipp/sensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double matern32(double d, double sigma_f2, double l) {
  const double r = std::sqrt(3.0) * d / l;
  return sigma_f2 * (1.0 + r) * std::exp(-r);
}

inline Eigen::MatrixXd kernel(const ipp::GridGeometry& g, double sigma_f2, double l) {
  const int n = g.size();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    const double xi = g.origin().x() + (g.col_of(i) + 0.5) * g.resolution();
    const double yi = g.origin().y() + (g.row_of(i) + 0.5) * g.resolution();
    for (int j = 0; j < n; ++j) {
      const double xj = g.origin().x() + (g.col_of(j) + 0.5) * g.resolution();
      const double yj = g.origin().y() + (g.row_of(j) + 0.5) * g.resolution();
      k(i, j) = matern32(std::hypot(xi - xj, yi - yj), sigma_f2, l);
    }
  }
  return k;
}

/// K - K (K + s I)^-1 K via a full-pivot LU solve.
inline Eigen::MatrixXd gp_prior(const ipp::GridGeometry& g, double sigma_f2, double l, double sigma_n2) {
  const Eigen::MatrixXd k = kernel(g, sigma_f2, l);
  const Eigen::MatrixXd a = k + sigma_n2 * Eigen::MatrixXd::Identity(k.rows(), k.cols());
  return k - k * a.fullPivLu().solve(k);
}

struct Observation {
  Eigen::MatrixXd h;  // m x n
  Eigen::VectorXd z;
  Eigen::VectorXd r;  // noise variances
};

inline Observation observation(const std::vector<ipp::MeasurementBlock>& rows, int n) {
  Observation o;
  const auto m = static_cast<Eigen::Index>(rows.size());
  o.h = Eigen::MatrixXd::Zero(m, n);
  o.z.resize(m);
  o.r.resize(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& b = rows[static_cast<std::size_t>(a)];
    for (int c : b.cells) o.h(a, c) += 1.0 / static_cast<double>(b.cells.size());
    o.z[a] = b.value;
    o.r[a] = b.variance;
  }
  return o;
}

inline Observation stack(const std::vector<Observation>& parts) {
  Eigen::Index m = 0;
  const Eigen::Index n = parts.front().h.cols();
  for (const auto& p : parts) m += p.h.rows();
  Observation o;
  o.h.resize(m, n);
  o.z.resize(m);
  o.r.resize(m);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    o.h.middleRows(at, p.h.rows()) = p.h;
    o.z.segment(at, p.h.rows()) = p.z;
    o.r.segment(at, p.h.rows()) = p.r;
    at += p.h.rows();
  }
  return o;
}

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Joint conditioning of N(mean, cov) on z = H x + e, e ~ N(0, diag(r)),
/// written from the joint Gaussian of (x, z).
inline Gaussian condition(const Gaussian& prior, const Observation& o) {
  const Eigen::MatrixXd cross = prior.cov * o.h.transpose();
  Eigen::MatrixXd s = o.h * cross;
  s.diagonal() += o.r;
  const auto lu = s.fullPivLu();
  Gaussian post;
  post.mean = prior.mean + cross * lu.solve(o.z - o.h * prior.mean);
  post.cov = prior.cov - cross * lu.solve(cross.transpose());
  return post;
}

inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Trace drop over `subset` (all cells when empty) of conditioning on `o`.
inline double trace_drop(const Eigen::MatrixXd& cov, const Observation& o, const std::vector<int>& subset = {}) {
  Gaussian g{Eigen::VectorXd::Zero(cov.rows()), cov};
  Observation zero = o;
  zero.z.setZero();
  const Eigen::MatrixXd post = condition(g, zero).cov;
  if (subset.empty()) return cov.trace() - post.trace();
  double d = 0.0;
  for (int c : subset) d += cov(c, c) - post(c, c);
  return d;
}

struct GreedyInstance {
  Gaussian map;
  std::vector<Eigen::Vector3d> points;
  Eigen::Vector3d start;
  std::function<Observation(const Eigen::Vector3d&)> observe;  // noise-free reading layout at a pose
  bool adaptive = false;
  double mu_th = 0.0;
  double beta = 0.0;
  double v_max = 5.0;
  double min_travel_time = 1.0;
};

inline std::vector<int> interesting(const Gaussian& g, double mu_th, double beta) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < g.mean.size(); ++i)
    if (g.mean[i] + beta * std::sqrt(std::max(g.cov(i, i), 0.0)) >= mu_th) out.push_back(static_cast<int>(i));
  return out;
}

/// Exhaustive search over every ordered sequence of n - 1 lattice indices
/// (repeats allowed). Sequences compare lexicographically by (rate at step 1,
/// lower index at step 1, rate at step 2, ...), with rates within a relative
/// `tie` treated as equal. Returns the winning waypoint list including start.
inline std::vector<Eigen::Vector3d> brute_force_greedy(const GreedyInstance& inst, int n, double tie = 1e-9) {
  const int k = static_cast<int>(inst.points.size());
  const int steps = n - 1;
  std::vector<int> seq(static_cast<std::size_t>(steps), 0), best_seq;
  std::vector<double> best_rates;
  auto better = [&](const std::vector<double>& r, const std::vector<int>& s) {
    if (best_rates.empty()) return true;
    for (int i = 0; i < steps; ++i) {
      const double scale = std::max(std::abs(r[i]), std::abs(best_rates[i]));
      if (std::abs(r[i] - best_rates[i]) > tie * scale) return r[i] > best_rates[i];
      if (s[i] != best_seq[i]) return s[i] < best_seq[i];
    }
    return false;
  };
  for (;;) {
    Gaussian g = inst.map;
    Eigen::Vector3d prev = inst.start;
    std::vector<double> rates;
    for (int idx : seq) {
      const auto& p = inst.points[static_cast<std::size_t>(idx)];
      const Observation o = inst.observe(p);
      const auto subset = inst.adaptive ? interesting(g, inst.mu_th, inst.beta) : std::vector<int>{};
      double gain = 0.0;
      if (!inst.adaptive || !subset.empty()) gain = trace_drop(g.cov, o, subset);
      rates.push_back(gain / std::max((p - prev).norm() / inst.v_max, inst.min_travel_time));
      Observation zero = o;
      zero.z = zero.h * g.mean;
      g = condition(g, zero);
      prev = p;
    }
    if (better(rates, seq)) {
      best_rates = rates;
      best_seq = seq;
    }
    int pos = steps - 1;
    while (pos >= 0 && ++seq[static_cast<std::size_t>(pos)] == k) seq[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  std::vector<Eigen::Vector3d> out{inst.start};
  for (int idx : best_seq) out.push_back(inst.points[static_cast<std::size_t>(idx)]);
  return out;
}

}  // namespace oracle
