#include "doctest.h"

#include "ipp/gp_map.hpp"
#include "support/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace ipp;

namespace {

std::vector<MeasurementBlock> layout_rows(const GPFieldMap& map, const Vec3& pose) {
  return measurement_layout(pose, CameraConfig{}, ContinuousSensorModel{}, map.geometry).blocks;
}

std::vector<MeasurementBlock> random_rows(const GridGeometry& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> xy(0.0, g.width());
  std::uniform_real_distribution<double> h(1.0, 14.0);
  std::normal_distribution<double> z(0.5, 0.3);
  auto rows = measurement_layout(Vec3(xy(rng), xy(rng), h(rng)), CameraConfig{}, ContinuousSensorModel{}, g).blocks;
  for (auto& r : rows) r.value = z(rng);
  return rows;
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("matern 3/2 kernel values") {
  const MaternKernel unit{1.0, 2.0, 0.1};
  CHECK(matern32(0.0, unit) == 1.0);
  CHECK(matern32(2.0, unit) == doctest::Approx((1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0))));
  CHECK(matern32(2.0, unit) == doctest::Approx(0.48335).epsilon(1e-4));
  CHECK(matern32(0.0, MaternKernel{}) == 1.82);
  CHECK_THROWS_AS(MaternKernel({1.0, 0.0, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("kernel matrix matches the oracle") {
  const GridGeometry g(Vec2(1.0, -2.0), 4.5, 3.0, 0.75);
  const MaternKernel k;
  const Eigen::MatrixXd lib = kernel_matrix(g, k);
  CHECK(oracle::relative_error(lib, oracle::kernel(g, k.sigma_f2, k.length_scale)) < 1e-14);
}

TEST_CASE("prior covariance matches K - K(K + sn I)^-1 K") {
  SUBCASE("2 x 2 grid by hand") {
    const GridGeometry g(Vec2::Zero(), 2.0, 2.0, 1.0);
    const MaternKernel k;
    const auto prior = build_prior(g, k, 0.5);
    CHECK(prior.mean.isApproxToConstant(0.5));
    CHECK(oracle::relative_error(prior.cov, oracle::gp_prior(g, k.sigma_f2, k.length_scale, k.sigma_n2)) < 1e-10);
    // corner symmetry: every cell is equivalent
    for (int i = 1; i < 4; ++i) CHECK(prior.cov(i, i) == doctest::Approx(prior.cov(0, 0)));
    CHECK(prior.cov(0, 1) == doctest::Approx(prior.cov(0, 2)));
    CHECK(prior.cov(0, 3) == doctest::Approx(prior.cov(1, 2)));
  }
  SUBCASE("30 x 30 m map") {
    const GridGeometry g(Vec2::Zero(), 30.0, 30.0, 0.75);
    const auto prior = build_prior(g, MaternKernel{}, 0.5);
    CHECK(prior.cov.trace() == doctest::Approx(235.61).epsilon(1e-4));
    CHECK(prior.cov.isApprox(prior.cov.transpose(), 0.0));
  }
}

TEST_CASE("a huge-noise reading leaves the map unchanged") {
  const GridGeometry g(Vec2::Zero(), 4.5, 4.5, 0.75);
  const auto prior = build_prior(g, MaternKernel{}, 0.5);
  auto rows = layout_rows(prior, Vec3(2.25, 2.25, 3.0));
  for (auto& r : rows) {
    r.variance = 1e12;
    r.value = 10.0;
  }
  GPFieldMap map = prior;
  fuse_in_place(map, rows);
  CHECK((map.mean - prior.mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((map.cov - prior.cov).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("single-cell Kalman update by hand") {
  const GridGeometry g(Vec2::Zero(), 1.0, 1.0, 1.0);
  GPFieldMap map{g, Eigen::VectorXd::Constant(1, 0.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  MeasurementBlock b;
  b.cells = {0};
  b.variance = 1.0;
  b.value = 2.0;
  fuse_in_place(map, std::vector<MeasurementBlock>{b});
  CHECK(map.cov(0, 0) == doctest::Approx(0.5));
  CHECK(map.mean[0] == doctest::Approx(1.0));
}

TEST_CASE("sequential fusion equals batch conditioning on every reading") {
  const GridGeometry g(Vec2::Zero(), 6.0, 6.0, 0.75);
  const MaternKernel k;
  std::mt19937_64 rng(17);
  for (int scenario = 0; scenario < 5; ++scenario) {
    GPFieldMap map = build_prior(g, k, 0.5);
    oracle::Gaussian ref{map.mean, oracle::gp_prior(g, k.sigma_f2, k.length_scale, k.sigma_n2)};
    std::vector<oracle::Observation> obs;
    for (int p = 0; p < 4; ++p) {
      const auto rows = random_rows(g, rng);
      fuse_in_place(map, rows);
      obs.push_back(oracle::observation(rows, g.size()));
    }
    const auto post = oracle::condition(ref, oracle::stack(obs));
    CHECK(oracle::relative_error(map.mean, post.mean) < 1e-8);
    CHECK(oracle::relative_error(map.cov, post.cov) < 1e-8);
  }
}

TEST_CASE("fusing the expected reading equals the covariance-only prediction") {
  const GridGeometry g(Vec2::Zero(), 6.0, 6.0, 0.75);
  const auto prior = build_prior(g, MaternKernel{}, 0.5);
  auto rows = layout_rows(prior, Vec3(3.0, 3.0, 11.0));
  const Eigen::MatrixXd h = measurement_matrix(g, rows);
  const Eigen::VectorXd expected = h * prior.mean;
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].value = expected[static_cast<Eigen::Index>(i)];
  GPFieldMap fused = prior, predicted = prior;
  fuse_in_place(fused, rows);
  predict_in_place(predicted, rows);
  CHECK((fused.mean - predicted.mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fused.cov - predicted.cov).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((predicted.mean - prior.mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("covariance stays symmetric positive semi-definite and traces never grow") {
  const GridGeometry g(Vec2::Zero(), 6.0, 6.0, 0.75);
  GPFieldMap map = build_prior(g, MaternKernel{}, 0.5);
  std::mt19937_64 rng(23);
  double prev = trace_uncertainty(map);
  for (int p = 0; p < 100; ++p) {
    fuse_in_place(map, random_rows(g, rng));
    CHECK(map.cov == map.cov.transpose());
    const double tr = trace_uncertainty(map);
    CHECK(tr <= prev + 1e-12);
    prev = tr;
  }
  CHECK(min_eigenvalue(map.cov) > -1e-9);
}

TEST_CASE("trace reduction matches the drop of an actual update") {
  const GridGeometry g(Vec2::Zero(), 9.0, 9.0, 0.75);
  const auto prior = build_prior(g, MaternKernel{}, 0.5);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<MeasurementBlock> rows;
    for (int p = 0; p < 3; ++p) {
      const auto more = random_rows(g, rng);
      rows.insert(rows.end(), more.begin(), more.end());
    }
    const auto obs = oracle::observation(rows, g.size());
    const double drop = trace_reduction(prior, rows);
    CHECK(drop == doctest::Approx(oracle::trace_drop(prior.cov, obs)).epsilon(1e-9));
    GPFieldMap updated = prior;
    predict_in_place(updated, rows);
    CHECK(drop == doctest::Approx(trace_uncertainty(prior) - trace_uncertainty(updated)).epsilon(1e-9));

    CellSet subset;
    for (int c = 0; c < g.size(); c += 3) subset.push_back(c);
    CHECK(trace_reduction(prior, rows, &subset) ==
          doctest::Approx(oracle::trace_drop(prior.cov, obs, subset)).epsilon(1e-9));
    CHECK(ApproxTraceReduction(prior, &subset)(rows) == doctest::Approx(trace_reduction(prior, rows, &subset)).epsilon(1e-4));
    CHECK(ApproxTraceReduction(prior)(rows) == doctest::Approx(drop).epsilon(1e-4));
  }
}

TEST_CASE("repeated readings of the same blocks merge into one row") {
  const GridGeometry g(Vec2::Zero(), 6.0, 6.0, 0.75);
  const auto prior = build_prior(g, MaternKernel{}, 0.5);
  auto rows = layout_rows(prior, Vec3(3.0, 3.0, 4.0));
  std::vector<MeasurementBlock> twice = rows;
  twice.insert(twice.end(), rows.begin(), rows.end());
  const auto merged = merge_duplicate_rows(twice);
  CHECK(merged.size() == rows.size());
  CHECK(merged.front().variance == doctest::Approx(rows.front().variance / 2.0));
  CHECK(trace_reduction(prior, twice) ==
        doctest::Approx(oracle::trace_drop(prior.cov, oracle::observation(twice, g.size()))).epsilon(1e-9));
}

TEST_CASE("interesting cells use the upper confidence bound") {
  const GridGeometry g(Vec2::Zero(), 2.0, 1.0, 1.0);
  GPFieldMap map{g, Eigen::Vector2d(0.35, 0.1), Eigen::Matrix2d::Identity() * 0.01};
  CHECK(interesting_cells_continuous(map, 0.4, 1.0) == CellSet{0});
  CHECK(interesting_cells_continuous(map, 0.4, 4.0) == CellSet{0, 1});
  CHECK(interesting_cells_continuous(map, 0.4, 0.0).empty());
}
