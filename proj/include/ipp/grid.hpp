#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace ipp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Linear (row-major) cell index into a GridGeometry.
using CellIndex = int;
using CellSet = std::vector<CellIndex>;

/// Raised when a linear-algebra step (Cholesky, solve) cannot be completed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inclusive rectangle of cells, [row_lo, row_hi] x [col_lo, col_hi].
/// Empty when row_lo > row_hi or col_lo > col_hi.
struct CellRect {
  int row_lo = 0;
  int row_hi = -1;
  int col_lo = 0;
  int col_hi = -1;

  bool empty() const { return row_lo > row_hi || col_lo > col_hi; }
  int rows() const { return empty() ? 0 : row_hi - row_lo + 1; }
  int cols() const { return empty() ? 0 : col_hi - col_lo + 1; }
  int size() const { return rows() * cols(); }
};

/// Regular 2-D grid anchored at `origin` (the minimum-x, minimum-y corner).
///
/// Rows run along +y and columns along +x. Cell (r, c) has linear index
/// r * cols + c and its center at origin + ((c + 0.5) res, (r + 0.5) res).
class GridGeometry {
 public:
  GridGeometry() = default;
  GridGeometry(Vec2 origin, double width, double height, double resolution);

  const Vec2& origin() const { return origin_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double resolution() const { return resolution_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }

  CellIndex index(int row, int col) const { return row * cols_ + col; }
  int row_of(CellIndex i) const { return i / cols_; }
  int col_of(CellIndex i) const { return i % cols_; }
  bool contains(CellIndex i) const { return i >= 0 && i < size(); }

  Vec2 center(CellIndex i) const { return center(row_of(i), col_of(i)); }
  Vec2 center(int row, int col) const;

  /// Cell containing a metric point, or -1 outside the grid.
  CellIndex locate(const Vec2& p) const;

  /// All cells whose centers satisfy |x - cx| <= half_x and |y - cy| <= half_y.
  CellRect cells_within(const Vec2& c, double half_x, double half_y) const;

  CellSet all_cells() const;
  CellSet cells_of(const CellRect& rect) const;

  friend bool operator==(const GridGeometry& a, const GridGeometry& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.resolution_ == b.resolution_ &&
           a.origin_ == b.origin_;
  }

 private:
  Vec2 origin_ = Vec2::Zero();
  double width_ = 0.0;
  double height_ = 0.0;
  double resolution_ = 1.0;
  int rows_ = 0;
  int cols_ = 0;
};

/// Axis-aligned box the vehicle may occupy (x, y lateral; z altitude).
struct Workspace {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool contains(const Vec3& p, double tol = 1e-9) const {
    return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
  }
  Vec3 clamp(const Vec3& p) const { return p.cwiseMax(lo).cwiseMin(hi); }
  Vec3 centroid() const { return 0.5 * (lo + hi); }
};

}  // namespace ipp
