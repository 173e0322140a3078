#include "ipp/metrics.hpp"

#include "ipp/csv.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ipp {
namespace {

void check_sizes(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() == 0)
    throw std::invalid_argument("metric inputs must cover the same, non-empty grid");
}

Eigen::VectorXd nlpd_terms(const GPFieldMap& map, const Eigen::VectorXd& truth) {
  check_sizes(map.mean, truth);
  const Eigen::VectorXd var = map.cov.diagonal();
  if ((var.array() <= 0.0).any()) throw NumericalError("non-positive predictive variance");
  const Eigen::ArrayXd r = truth.array() - map.mean.array();
  return (0.5 * (2.0 * std::numbers::pi * var.array()).log() + r.square() / (2.0 * var.array())).matrix();
}

}  // namespace

double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  check_sizes(estimate, truth);
  return std::sqrt((estimate - truth).squaredNorm() / static_cast<double>(truth.size()));
}

Eigen::VectorXd value_weights(const Eigen::VectorXd& truth) {
  const double mx = truth.size() ? truth.maxCoeff() : 0.0;
  if (!(mx > 0.0)) return Eigen::VectorXd::Ones(truth.size());
  Eigen::VectorXd w = truth.cwiseMax(0.0) / mx;
  return w / w.mean();
}

double wrmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  check_sizes(estimate, truth);
  const Eigen::VectorXd w = value_weights(truth);
  return std::sqrt(w.dot((estimate - truth).cwiseAbs2()) / static_cast<double>(truth.size()));
}

double mll(const GPFieldMap& map, const Eigen::VectorXd& truth) { return nlpd_terms(map, truth).mean(); }

double wmll(const GPFieldMap& map, const Eigen::VectorXd& truth) {
  return value_weights(truth).dot(nlpd_terms(map, truth)) / static_cast<double>(truth.size());
}

double delta_sigma2(const Eigen::VectorXd& variances, const CellSet& interesting) {
  std::vector<char> in(static_cast<std::size_t>(variances.size()), 0);
  for (CellIndex c : interesting) {
    if (c < 0 || c >= variances.size()) throw std::invalid_argument("interesting cell outside the map");
    in[static_cast<std::size_t>(c)] = 1;
  }
  double sum_in = 0.0, sum_out = 0.0;
  int n_in = 0, n_out = 0;
  for (Eigen::Index i = 0; i < variances.size(); ++i) {
    if (in[static_cast<std::size_t>(i)]) {
      sum_in += variances[i];
      ++n_in;
    } else {
      sum_out += variances[i];
      ++n_out;
    }
  }
  if (n_in == 0 || n_out == 0) return std::nan("");
  const double out_mean = sum_out / n_out;
  return (out_mean - sum_in / n_in) / out_mean;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"uncertainty", "rmse", "wrmse", "mll", "wmll", "delta_sigma2"};
  return names;
}

double metric_value(const MetricsRecord& r, const std::string& name) {
  if (name == "uncertainty") return r.uncertainty;
  if (name == "rmse") return r.rmse;
  if (name == "wrmse") return r.wrmse;
  if (name == "mll") return r.mll;
  if (name == "wmll") return r.wmll;
  if (name == "delta_sigma2") return r.delta_sigma2;
  if (name == "measurements") return r.measurements;
  if (name == "t") return r.t;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

void write_metrics_csv(const std::vector<MetricsRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "t,measurements,uncertainty,rmse,wrmse,mll,wmll,delta_sigma2,trial,planner\n";
  for (const auto& r : records)
    out << csv::format(r.t) << ',' << r.measurements << ',' << csv::format(r.uncertainty) << ',' << csv::format(r.rmse)
        << ',' << csv::format(r.wrmse) << ',' << csv::format(r.mll) << ',' << csv::format(r.wmll) << ','
        << csv::format(r.delta_sigma2) << ',' << r.trial << ',' << r.planner << '\n';
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<MetricsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 10) throw std::invalid_argument("metrics CSV row must have 10 fields: " + line);
    MetricsRecord r;
    r.t = csv::parse(f[0]);
    r.measurements = static_cast<int>(csv::parse(f[1]));
    r.uncertainty = csv::parse(f[2]);
    r.rmse = csv::parse(f[3]);
    r.wrmse = csv::parse(f[4]);
    r.mll = csv::parse(f[5]);
    r.wmll = csv::parse(f[6]);
    r.delta_sigma2 = csv::parse(f[7]);
    r.trial = static_cast<int>(csv::parse(f[8]));
    r.planner = std::string(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

const MetricsRecord& record_at(const std::vector<MetricsRecord>& trial, double time) {
  if (trial.empty()) throw std::invalid_argument("empty metrics stream");
  const auto it = std::upper_bound(trial.begin(), trial.end(), time,
                                   [](double t, const MetricsRecord& r) { return t < r.t; });
  return it == trial.begin() ? trial.front() : *std::prev(it);
}

MeanCi mean_confidence(const std::vector<double>& samples, double level) {
  MeanCi out;
  double sum = 0.0;
  for (double v : samples)
    if (!std::isnan(v)) {
      sum += v;
      ++out.count;
    }
  if (out.count == 0) return {std::nan(""), std::nan(""), 0};
  out.mean = sum / out.count;
  if (out.count < 2) {
    out.half_width = std::nan("");
    return out;
  }
  double ss = 0.0;
  for (double v : samples)
    if (!std::isnan(v)) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / (out.count - 1));
  const boost::math::students_t dist(out.count - 1);
  out.half_width = boost::math::quantile(dist, 0.5 + level / 2.0) * sd / std::sqrt(static_cast<double>(out.count));
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<std::vector<MetricsRecord>>& trials, double horizon, double bin,
                                    double level) {
  if (!(bin > 0.0)) throw std::invalid_argument("aggregation bin must be positive");
  std::vector<AggregateRow> rows;
  if (trials.empty()) return rows;
  const auto nbins = static_cast<long>(std::floor(horizon / bin + 1e-9));
  for (long k = 0; k <= nbins; ++k) {
    AggregateRow row;
    row.t = static_cast<double>(k) * bin;
    for (const auto& name : metric_names()) {
      std::vector<double> v;
      v.reserve(trials.size());
      for (const auto& trial : trials) v.push_back(metric_value(record_at(trial, row.t), name));
      row.metrics.push_back(mean_confidence(v, level));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "t";
  for (const auto& name : metric_names()) out << ',' << name << "_mean," << name << "_ci," << name << "_n";
  out << '\n';
  for (const auto& row : rows) {
    out << csv::format(row.t);
    for (const auto& m : row.metrics) out << ',' << csv::format(m.mean) << ',' << csv::format(m.half_width) << ',' << m.count;
    out << '\n';
  }
}

WelchResult welch_greater(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("Welch test needs at least two samples per group");
  auto moments = [](const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::pair{m, s / static_cast<double>(x.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double qa = va / na, qb = vb / nb;
  WelchResult r;
  const double se2 = qa + qb;
  if (se2 <= 0.0) {
    // Degenerate: both groups constant.
    r.t_statistic = ma > mb ? std::numeric_limits<double>::infinity() : 0.0;
    r.dof = na + nb - 2.0;
    r.p_value = ma > mb ? 0.0 : 1.0;
  } else {
    r.t_statistic = (ma - mb) / std::sqrt(se2);
    r.dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    const boost::math::students_t dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.t_statistic));
  }
  r.significant = r.p_value < alpha;
  return r;
}

}  // namespace ipp
