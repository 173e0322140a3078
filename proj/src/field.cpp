#include "ipp/field.hpp"

#include "ipp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace ipp {
namespace {

struct Bump {
  Vec2 center;
  double radius;
  double amplitude;
};

// Raw (unscaled) bump-sum field. Bump count is n/50 scaled by U(0.5, 1.5).
Eigen::VectorXd raw_bump_field(const GridGeometry& g, Interval radius, std::mt19937_64& rng) {
  if (!(radius.lo > 0.0) || radius.hi < radius.lo)
    throw std::invalid_argument("cluster radius range must be positive and ordered");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double nominal = g.size() / 50.0;
  const int count = std::max(1, static_cast<int>(std::lround(nominal * (0.5 + unit(rng)))));

  std::vector<Bump> bumps;
  bumps.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Bump b;
    b.center = g.origin() + Vec2(unit(rng) * g.width(), unit(rng) * g.height());
    b.radius = radius.lo + unit(rng) * (radius.hi - radius.lo);
    b.amplitude = 2.0 * unit(rng) - 1.0;
    bumps.push_back(b);
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const Vec2 c = g.center(i);
    double s = 0.0;
    for (const auto& b : bumps) s += b.amplitude * std::exp(-(c - b.center).squaredNorm() / (2.0 * b.radius * b.radius));
    v[i] = s;
  }
  return v;
}

// Affine map of the selected entries so that their min/max hit [lo, hi].
void rescale(Eigen::VectorXd& v, const std::vector<CellIndex>& cells, double lo, double hi) {
  if (cells.empty()) return;
  double mn = v[cells.front()], mx = v[cells.front()];
  for (CellIndex i : cells) {
    mn = std::min(mn, v[i]);
    mx = std::max(mx, v[i]);
  }
  const double span = mx - mn;
  for (CellIndex i : cells) {
    if (span <= 0.0 || v[i] == mn) {
      v[i] = lo;
    } else if (v[i] == mx) {
      v[i] = hi;
    } else {
      v[i] = std::clamp(lo + (v[i] - mn) / span * (hi - lo), lo, hi);
    }
  }
}

void check_geometry(const GridGeometry& g) {
  if (!(g.resolution() > 0.0) || g.size() < 1) throw std::invalid_argument("invalid grid geometry");
}

}  // namespace

GroundTruthField generate_gaussian_field(const GridGeometry& geometry, Interval cluster_radius,
                                         Interval value_range, std::uint64_t seed) {
  check_geometry(geometry);
  if (value_range.lo < 0.0 || value_range.hi > 100.0 || value_range.hi < value_range.lo)
    throw std::invalid_argument("value range must be an ordered interval within [0, 100]");
  std::mt19937_64 rng(seed);
  GroundTruthField f;
  f.geometry = geometry;
  f.seed = seed;
  f.kind = FieldKind::Continuous;
  f.values = raw_bump_field(geometry, cluster_radius, rng);
  rescale(f.values, geometry.all_cells(), value_range.lo, value_range.hi);
  return f;
}

GroundTruthField generate_split_field(const GridGeometry& geometry, double threshold, std::uint64_t seed,
                                      Interval cluster_radius) {
  check_geometry(geometry);
  if (threshold < 0.0 || threshold > 100.0) throw std::invalid_argument("split threshold must lie in [0, 100]");
  std::mt19937_64 rng(seed);
  GroundTruthField f;
  f.geometry = geometry;
  f.seed = seed;
  f.values = raw_bump_field(geometry, cluster_radius, rng);

  const int low_cols = geometry.cols() / 2;
  std::vector<CellIndex> low, high;
  for (int i = 0; i < geometry.size(); ++i) (geometry.col_of(i) < low_cols ? low : high).push_back(i);

  // Low half sits strictly below the threshold unless the threshold is 0,
  // in which case it collapses onto 0.
  const double low_hi = threshold > 0.0 ? threshold * (1.0 - 1e-9) : 0.0;
  rescale(f.values, low, 0.0, low_hi);
  rescale(f.values, high, threshold, 100.0);
  return f;
}

GroundTruthField generate_binary_field(const GridGeometry& geometry, double occupancy_fraction,
                                       std::uint64_t seed, Interval cluster_radius) {
  check_geometry(geometry);
  if (!(occupancy_fraction >= 0.0 && occupancy_fraction <= 1.0))
    throw std::invalid_argument("occupancy fraction must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  const Eigen::VectorXd raw = raw_bump_field(geometry, cluster_radius, rng);

  const int n = geometry.size();
  const int occupied = static_cast<int>(std::lround(occupancy_fraction * n));
  std::vector<CellIndex> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](CellIndex a, CellIndex b) { return raw[a] > raw[b]; });

  GroundTruthField f;
  f.geometry = geometry;
  f.seed = seed;
  f.kind = FieldKind::Binary;
  f.values = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < occupied; ++k) f.values[order[static_cast<std::size_t>(k)]] = 1.0;
  return f;
}

void save_grid_csv(const GridGeometry& geometry, const Eigen::VectorXd& values, const std::filesystem::path& path) {
  if (values.size() != geometry.size()) throw std::invalid_argument("value count does not match geometry");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (int r = 0; r < geometry.rows(); ++r) {
    for (int c = 0; c < geometry.cols(); ++c) {
      if (c) out << ',';
      out << csv::format(values[geometry.index(r, c)]);
    }
    out << '\n';
  }
}

void save_field_csv(const GroundTruthField& field, const std::filesystem::path& path) {
  save_grid_csv(field.geometry, field.values, path);
}

GroundTruthField load_field_csv(const std::filesystem::path& path, const GridGeometry& geometry, FieldKind kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  GroundTruthField f;
  f.geometry = geometry;
  f.kind = kind;
  f.values = Eigen::VectorXd::Zero(geometry.size());
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= geometry.rows()) throw std::invalid_argument("field CSV has more rows than the geometry");
    const auto cells = csv::split(line);
    if (static_cast<int>(cells.size()) != geometry.cols())
      throw std::invalid_argument("field CSV row " + std::to_string(row) + " has wrong column count");
    for (int c = 0; c < geometry.cols(); ++c) f.values[geometry.index(row, c)] = csv::parse(cells[static_cast<std::size_t>(c)]);
    ++row;
  }
  if (row != geometry.rows()) throw std::invalid_argument("field CSV has fewer rows than the geometry");
  return f;
}

}  // namespace ipp
