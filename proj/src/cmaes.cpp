#include "ipp/cmaes.hpp"

#include "ipp/csv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ipp {
namespace {

double safe_score(double v) { return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity(); }

}  // namespace

void CmaConfig::validate(Eigen::Index d) const {
  if (d < 1) throw std::invalid_argument("CMA-ES needs at least one dimension");
  if (initial_step_sizes.size() != d || lower.size() != d || upper.size() != d)
    throw std::invalid_argument("CMA-ES step sizes and bounds must match the problem dimension");
  if ((initial_step_sizes.array() <= 0.0).any()) throw std::invalid_argument("CMA-ES step sizes must be positive");
  if ((lower.array() >= upper.array()).any()) throw std::invalid_argument("CMA-ES bounds need lo < hi");
  if (population_size != 0 && population_size < 2) throw std::invalid_argument("CMA-ES population must be at least 2");
  if (max_iterations < 0) throw std::invalid_argument("CMA-ES iteration count must be non-negative");
}

int CmaConfig::lambda(Eigen::Index d) const {
  return population_size > 0 ? population_size : 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(d))));
}

CmaResult maximize(const CmaObjective& objective, const Eigen::VectorXd& x0, const CmaConfig& config,
                   const std::optional<std::filesystem::path>& trace_csv) {
  const Eigen::Index n = x0.size();
  config.validate(n);
  if ((x0.array() < config.lower.array()).any() || (x0.array() > config.upper.array()).any())
    throw std::invalid_argument("CMA-ES start point lies outside the bounds");

  const int lambda = config.lambda(n);
  const int mu = lambda / 2;
  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();
  const double nd = static_cast<double>(n);

  const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
  const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
  const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

  const Eigen::VectorXd& sigma0 = config.initial_step_sizes;
  double sigma = sigma0.maxCoeff();
  Eigen::VectorXd d_diag = sigma0 / sigma;  // sqrt of C's eigenvalues
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd c = d_diag.cwiseAbs2().asDiagonal();
  Eigen::VectorXd pc = Eigen::VectorXd::Zero(n), ps = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd mean = x0;

  CmaResult result;
  result.x = x0;
  result.score = safe_score(objective(x0));

  std::ofstream trace;
  if (trace_csv) {
    trace.open(*trace_csv);
    if (!trace) throw std::runtime_error("cannot open " + trace_csv->string() + " for writing");
    trace << "iteration,evaluations,sigma,generation_best,best\n";
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, lambda), y(n, lambda), x(n, lambda);
  std::vector<double> score(static_cast<std::size_t>(lambda)), ranked(static_cast<std::size_t>(lambda));
  std::vector<double> penalty(static_cast<std::size_t>(lambda));
  std::vector<int> order(static_cast<std::size_t>(lambda));

  for (int it = 0; it < config.max_iterations; ++it) {
    for (int k = 0; k < lambda; ++k)
      for (Eigen::Index i = 0; i < n; ++i) z(i, k) = normal(rng);
    y = b * d_diag.asDiagonal() * z;
    x = (sigma * y).colwise() + mean;

    double gen_best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < lambda; ++k) {
      const Eigen::VectorXd raw = x.col(k);
      const Eigen::VectorXd clipped = raw.cwiseMax(config.lower).cwiseMin(config.upper);
      const auto ku = static_cast<std::size_t>(k);
      score[ku] = safe_score(objective(clipped));
      penalty[ku] = ((raw - clipped).array() / sigma0.array()).square().sum();
      ++result.evaluations;
      gen_best = std::max(gen_best, score[ku]);
      if (score[ku] > result.score) {
        result.score = score[ku];
        result.x = clipped;
      }
    }

    // Penalty weight tracks the spread of this generation's finite scores.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double s : score)
      if (std::isfinite(s)) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    const double gamma = std::isfinite(lo) && hi > lo ? hi - lo : 1.0;
    for (int k = 0; k < lambda; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      ranked[ku] = std::isfinite(score[ku]) ? score[ku] - gamma * penalty[ku] : -std::numeric_limits<double>::infinity();
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int bb) { return ranked[static_cast<std::size_t>(a)] > ranked[static_cast<std::size_t>(bb)]; });

    const Eigen::VectorXd old_mean = mean;
    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * y.col(order[static_cast<std::size_t>(i)]);
    mean = old_mean + sigma * y_w;

    // C^{-1/2} y_w = B D^-1 B^T y_w
    const Eigen::VectorXd inv_sqrt_y = b * (b.transpose() * y_w).cwiseQuotient(d_diag);
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_y;
    const double gen = static_cast<double>(it + 1);
    const double ps_norm = ps.norm();
    const bool hsig =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen)) / chi_n < 1.4 + 2.0 / (nd + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const Eigen::VectorXd yi = y.col(order[static_cast<std::size_t>(i)]);
      rank_mu.noalias() += weights[i] * yi * yi.transpose();
    }
    const double delta_h = hsig ? 0.0 : cc * (2.0 - cc);
    c = (1.0 - c1 - cmu) * c + c1 * (pc * pc.transpose() + delta_h * c) + cmu * rank_mu;
    c = 0.5 * (c + c.transpose()).eval();

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    if (eig.info() != Eigen::Success) break;
    b = eig.eigenvectors();
    d_diag = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();

    result.iterations = it + 1;
    result.best_history.push_back(result.score);
    if (trace)
      trace << result.iterations << ',' << result.evaluations << ',' << csv::format(sigma) << ','
            << csv::format(gen_best) << ',' << csv::format(result.score) << '\n';
    if (!std::isfinite(sigma) || sigma * d_diag.maxCoeff() < 1e-14 * sigma0.minCoeff()) break;
  }
  return result;
}

}  // namespace ipp
