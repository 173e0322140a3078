#include "doctest.h"

#include "ipp/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace ipp;

TEST_CASE("rmse") {
  CHECK(rmse(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1)) == 0.0);
  CHECK(rmse(Eigen::Vector4d(1, 1, 1, 1), Eigen::Vector4d(0, 0, 0, 0)) == doctest::Approx(1.0));
  CHECK(rmse(Eigen::Vector2d(3, 0), Eigen::Vector2d(0, 4)) == doctest::Approx(std::sqrt(12.5)));
  CHECK_THROWS_AS(rmse(Eigen::Vector2d(1, 1), Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
}

TEST_CASE("value-weighted errors ignore zero-valued cells") {
  const Eigen::Vector4d truth(0, 2, 2, 0);
  CHECK(value_weights(truth).isApprox(Eigen::Vector4d(0, 2, 2, 0)));
  CHECK(wrmse(Eigen::Vector4d(5, 2, 2, -3), truth) == 0.0);
  // error only on weighted cells: sqrt((2 * 1 + 2 * 1) / 4)
  CHECK(wrmse(Eigen::Vector4d(0, 3, 1, 0), truth) == doctest::Approx(1.0));
  CHECK(value_weights(Eigen::Vector3d(0, 0, 0)).isApprox(Eigen::Vector3d(1, 1, 1)));
}

TEST_CASE("mean negative log predictive density") {
  const GridGeometry g(Vec2::Zero(), 2.0, 1.0, 1.0);
  GPFieldMap map{g, Eigen::Vector2d(0.5, 0.5), Eigen::Matrix2d::Identity() / (2.0 * std::numbers::pi)};
  CHECK(mll(map, Eigen::Vector2d(0.5, 0.5)) == doctest::Approx(0.0).epsilon(1e-12));
  map.cov = Eigen::Matrix2d::Identity();
  const double expected = 0.5 * std::log(2.0 * std::numbers::pi) + 0.5 * (1.0 + 0.0) / 2.0;
  CHECK(mll(map, Eigen::Vector2d(1.5, 0.5)) == doctest::Approx(expected));
  CHECK(wmll(map, Eigen::Vector2d(1.0, 1.0)) == doctest::Approx(mll(map, Eigen::Vector2d(1.0, 1.0))));
  map.cov(1, 1) = 0.0;
  CHECK_THROWS_AS(mll(map, Eigen::Vector2d(0.5, 0.5)), NumericalError);
}

TEST_CASE("relative uncertainty difference") {
  const Eigen::Vector4d var(1.0, 1.0, 0.25, 0.25);
  CHECK(delta_sigma2(var, {2, 3}) == doctest::Approx(0.75));
  CHECK(delta_sigma2(var, {0, 1}) == doctest::Approx(-3.0));
  CHECK(std::isnan(delta_sigma2(var, {})));
  CHECK(std::isnan(delta_sigma2(var, {0, 1, 2, 3})));
}

TEST_CASE("record lookup is a step function of time") {
  std::vector<MetricsRecord> trial(3);
  trial[0].t = 0.0;
  trial[0].uncertainty = 10;
  trial[1].t = 5.0;
  trial[1].uncertainty = 8;
  trial[2].t = 12.0;
  trial[2].uncertainty = 3;
  CHECK(record_at(trial, 4.9).uncertainty == 10);
  CHECK(record_at(trial, 5.0).uncertainty == 8);
  CHECK(record_at(trial, 100.0).uncertainty == 3);
}

TEST_CASE("mean and confidence interval") {
  const auto m = mean_confidence({1.0, 2.0, 3.0, std::nan("")});
  CHECK(m.count == 3);
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.half_width == doctest::Approx(4.302653 * 1.0 / std::sqrt(3.0)).epsilon(1e-5));
  CHECK(std::isnan(mean_confidence({1.0}).half_width));
}

TEST_CASE("aggregate averages trials per time bin") {
  std::vector<std::vector<MetricsRecord>> trials(2, std::vector<MetricsRecord>(2));
  trials[0][0].uncertainty = 10.0;
  trials[0][1] = MetricsRecord{3.0, 1, 6.0};
  trials[1][0].uncertainty = 12.0;
  trials[1][1] = MetricsRecord{1.5, 1, 4.0};
  const auto rows = aggregate(trials, 4.0, 1.0);
  REQUIRE(rows.size() == 5u);
  CHECK(std::abs(rows[0].metrics[0].mean - 11.0) < 1e-12);
  CHECK(std::abs(rows[2].metrics[0].mean - 7.0) < 1e-12);
  CHECK(std::abs(rows[3].metrics[0].mean - 5.0) < 1e-12);
  CHECK(rows[4].t == 4.0);
}

TEST_CASE("one-sided Welch test") {
  const auto r = welch_greater({1, 2, 3, 4, 5}, {0, 0.5, 1, 1.5, 2});
  CHECK(r.t_statistic == doctest::Approx(2.5298221281347035));
  CHECK(r.dof == doctest::Approx(5.882352941176471));
  CHECK(r.p_value == doctest::Approx(0.02273230948546521).epsilon(1e-6));
  CHECK(r.significant);
  const auto reverse = welch_greater({0, 0.5, 1, 1.5, 2}, {1, 2, 3, 4, 5});
  CHECK(reverse.p_value == doctest::Approx(1.0 - r.p_value));
  CHECK(!reverse.significant);
  CHECK_THROWS_AS(welch_greater({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("metrics CSV round-trips") {
  std::vector<MetricsRecord> recs;
  for (int i = 0; i < 4; ++i)
    recs.push_back({i * 6.6666666666666667, i, 200.0 - i * 1.0 / 3.0, 0.1 * i, 0.2, -1.0 / 7.0, 0.3, std::nan(""), 2, "cmaes"});
  const auto path = std::filesystem::temp_directory_path() / "ipp_metrics_roundtrip.csv";
  write_metrics_csv(recs, path);
  const auto back = read_metrics_csv(path);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].t == recs[i].t);
    CHECK(back[i].measurements == recs[i].measurements);
    CHECK(back[i].uncertainty == recs[i].uncertainty);
    CHECK(back[i].mll == recs[i].mll);
    CHECK(std::isnan(back[i].delta_sigma2));
    CHECK(back[i].planner == "cmaes");
    CHECK(back[i].trial == 2);
  }
  std::filesystem::remove(path);
}
