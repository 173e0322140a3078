#include "doctest.h"

#include "ipp/cmaes.hpp"

#include <cmath>
#include <limits>

using namespace ipp;

namespace {

CmaConfig box_config(int d, double step, std::uint64_t seed) {
  CmaConfig c;
  c.initial_step_sizes = Eigen::VectorXd::Constant(d, step);
  c.lower = Eigen::VectorXd::Constant(d, -10.0);
  c.upper = Eigen::VectorXd::Constant(d, 10.0);
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("default population size") {
  CmaConfig c = box_config(12, 1.0, 0);
  CHECK(c.lambda(12) == 11);
  CHECK(c.lambda(3) == 7);
  c.population_size = 20;
  CHECK(c.lambda(12) == 20);
}

TEST_CASE("configuration is validated against the dimension") {
  CmaConfig c = box_config(3, 1.0, 0);
  CHECK_NOTHROW(c.validate(3));
  CHECK_THROWS_AS(c.validate(4), std::invalid_argument);
  c.initial_step_sizes[1] = 0.0;
  CHECK_THROWS_AS(c.validate(3), std::invalid_argument);
  c = box_config(3, 1.0, 0);
  c.lower[0] = 10.0;
  CHECK_THROWS_AS(c.validate(3), std::invalid_argument);
  c = box_config(3, 1.0, 0);
  c.population_size = 1;
  CHECK_THROWS_AS(c.validate(3), std::invalid_argument);
}

TEST_CASE("recovers the optimum of a convex quadratic") {
  const Eigen::Vector3d c(2.0, -3.0, 4.5);
  const auto f = [&](const Eigen::VectorXd& x) { return -(x - c).squaredNorm(); };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = maximize(f, Eigen::Vector3d(-1.0, 1.0, 0.0), box_config(3, 2.0, seed));
    CHECK((r.x - c).norm() < 0.1 * 2.0);
    CHECK(r.iterations == 45);
    CHECK(r.evaluations == 45 * 7);
  }
}

TEST_CASE("returned points respect the box and the history is monotone") {
  // optimum outside the box: the best point sits on the boundary
  const Eigen::Vector3d c(15.0, -2.0, 0.0);
  const auto f = [&](const Eigen::VectorXd& x) { return -(x - c).squaredNorm(); };
  const auto cfg = box_config(3, 3.0, 4);
  const auto r = maximize(f, Eigen::Vector3d::Zero(), cfg);
  CHECK((r.x.array() >= cfg.lower.array()).all());
  CHECK((r.x.array() <= cfg.upper.array()).all());
  CHECK(r.x[0] == doctest::Approx(10.0).epsilon(1e-3));
  for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] >= r.best_history[i - 1]);
  CHECK(r.score >= f(Eigen::Vector3d::Zero()));
}

TEST_CASE("zero iterations returns the start point") {
  auto cfg = box_config(2, 1.0, 0);
  cfg.max_iterations = 0;
  const auto f = [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
  const auto r = maximize(f, Eigen::Vector2d(1.0, 2.0), cfg);
  CHECK(r.x == Eigen::Vector2d(1.0, 2.0));
  CHECK(r.score == -5.0);
  CHECK(r.evaluations == 0);
}

TEST_CASE("same seed gives identical results") {
  const auto f = [](const Eigen::VectorXd& x) { return std::sin(x[0]) * std::cos(x[1]) - 0.01 * x.squaredNorm(); };
  const auto a = maximize(f, Eigen::Vector2d(0.3, 0.1), box_config(2, 2.0, 99));
  const auto b = maximize(f, Eigen::Vector2d(0.3, 0.1), box_config(2, 2.0, 99));
  CHECK(a.x == b.x);
  CHECK(a.score == b.score);
  CHECK(a.best_history == b.best_history);
}

TEST_CASE("non-finite objective values are tolerated") {
  const auto f = [](const Eigen::VectorXd& x) {
    if (x[0] > 1.0) return std::numeric_limits<double>::quiet_NaN();
    return -(x[0] - 0.5) * (x[0] - 0.5) - x[1] * x[1];
  };
  const auto r = maximize(f, Eigen::Vector2d(-2.0, 2.0), box_config(2, 1.0, 3));
  CHECK(std::isfinite(r.score));
  CHECK(r.x[0] <= 1.0);
  CHECK(r.score > -0.05);
}
