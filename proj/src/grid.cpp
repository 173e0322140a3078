#include "ipp/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ipp {

GridGeometry::GridGeometry(Vec2 origin, double width, double height, double resolution)
    : origin_(std::move(origin)), width_(width), height_(height), resolution_(resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("grid extent must be positive");
  rows_ = static_cast<int>(std::lround(height / resolution));
  cols_ = static_cast<int>(std::lround(width / resolution));
  if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("grid must contain at least one cell");
}

Vec2 GridGeometry::center(int row, int col) const {
  return origin_ + Vec2((col + 0.5) * resolution_, (row + 0.5) * resolution_);
}

CellIndex GridGeometry::locate(const Vec2& p) const {
  const Vec2 rel = (p - origin_) / resolution_;
  const int col = static_cast<int>(std::floor(rel.x()));
  const int row = static_cast<int>(std::floor(rel.y()));
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) return -1;
  return index(row, col);
}

CellRect GridGeometry::cells_within(const Vec2& c, double half_x, double half_y) const {
  // Center of column j is origin.x + (j + 0.5) res; solve for the index bounds.
  constexpr double kEps = 1e-9;
  const Vec2 rel = (c - origin_) / resolution_;
  CellRect r;
  r.col_lo = std::max(0, static_cast<int>(std::ceil(rel.x() - half_x / resolution_ - 0.5 - kEps)));
  r.col_hi = std::min(cols_ - 1, static_cast<int>(std::floor(rel.x() + half_x / resolution_ - 0.5 + kEps)));
  r.row_lo = std::max(0, static_cast<int>(std::ceil(rel.y() - half_y / resolution_ - 0.5 - kEps)));
  r.row_hi = std::min(rows_ - 1, static_cast<int>(std::floor(rel.y() + half_y / resolution_ - 0.5 + kEps)));
  return r;
}

CellSet GridGeometry::all_cells() const {
  CellSet s(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) s[static_cast<std::size_t>(i)] = i;
  return s;
}

CellSet GridGeometry::cells_of(const CellRect& rect) const {
  CellSet s;
  s.reserve(static_cast<std::size_t>(rect.size()));
  for (int r = rect.row_lo; r <= rect.row_hi; ++r)
    for (int c = rect.col_lo; c <= rect.col_hi; ++c) s.push_back(index(r, c));
  return s;
}

}  // namespace ipp
