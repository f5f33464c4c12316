#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace wbplan {

struct CellIndex {
  int i = 0;  // column, grows with world x
  int j = 0;  // row, grows with world y

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Binary 2-D occupancy grid. Cell (0,0) has its lower-left corner at
/// origin(); cells are stored row-major with j = 0 as the bottom row.
/// Anything outside the map reads as occupied.
class OccupancyGrid {
 public:
  OccupancyGrid(int width_cells, int height_cells, double resolution,
                Eigen::Vector2d origin, std::vector<std::uint8_t> cells);

  /// Uniform grid, all free or all occupied.
  static OccupancyGrid uniform(int width_cells, int height_cells, double resolution,
                               Eigen::Vector2d origin = Eigen::Vector2d::Zero(),
                               bool occupied = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double resolution() const noexcept { return resolution_; }
  const Eigen::Vector2d& origin() const noexcept { return origin_; }
  Eigen::Vector2d extent() const noexcept {
    return {width_ * resolution_, height_ * resolution_};
  }

  bool inBounds(CellIndex c) const noexcept {
    return c.i >= 0 && c.j >= 0 && c.i < width_ && c.j < height_;
  }
  bool isOccupied(CellIndex c) const noexcept {
    return !inBounds(c) || cells_[static_cast<std::size_t>(c.j) * width_ + c.i] != 0;
  }
  bool isOccupied(const Eigen::Vector2d& p) const noexcept { return isOccupied(worldToCell(p)); }

  /// Only meant for map construction; a loaded grid is treated as immutable.
  void setOccupied(CellIndex c, bool occupied);

  /// Marks every cell whose center lies in the axis-aligned world box.
  void fillBox(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, bool occupied = true);

  CellIndex worldToCell(const Eigen::Vector2d& p) const noexcept;
  Eigen::Vector2d cellCenter(CellIndex c) const noexcept;

  /// True iff any cell geometrically intersected by the closed segment
  /// [p0, p1] is occupied (supercover traversal).
  bool segmentHitsObstacle(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1) const;

  /// Visits every cell the segment intersects, in traversal order. The visitor
  /// returns false to stop early; the function returns false iff stopped.
  template <typename Visitor>
  bool forEachSupercoverCell(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                             Visitor&& visit) const;

  /// True iff any cell intersected by the closed convex polygon (vertices in
  /// either winding) is occupied. Rasterizes row by row.
  bool convexPolygonHitsObstacle(std::span<const Eigen::Vector2d> vertices) const;

  /// True iff any cell in row j between columns lo..hi (inclusive) is occupied
  /// or out of bounds. Constant time via per-row prefix counts.
  bool rowSpanOccupied(int j, int col_lo, int col_hi) const noexcept;

  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }

 private:
  void rebuildRowPrefix(int j);

  int width_;
  int height_;
  double resolution_;
  Eigen::Vector2d origin_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint32_t> row_prefix_;  // (width + 1) entries per row
};

/// Reads an ASCII map ("res <m> origin <x> <y>" header, then rows of '#'/'.'
/// with the first row at the top) or a PGM bitmap carrying the same header as
/// a comment line. Gray values below mid-gray are occupied.
OccupancyGrid loadMap(std::istream& in);
OccupancyGrid loadMapFile(const std::filesystem::path& path);

/// Writes the ASCII form accepted by loadMap.
void writeMap(std::ostream& out, const OccupancyGrid& grid);

// ---------------------------------------------------------------------------

template <typename Visitor>
bool OccupancyGrid::forEachSupercoverCell(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                          Visitor&& visit) const {
  // Amanatides-Woo traversal in cell units. When the ray crosses a lattice
  // corner exactly, both side cells are emitted so no touched cell is skipped.
  const double inv_res = 1.0 / resolution_;
  const double ux = (p0.x() - origin_.x()) * inv_res;
  const double uy = (p0.y() - origin_.y()) * inv_res;
  const double dx = (p1.x() - p0.x()) * inv_res;
  const double dy = (p1.y() - p0.y()) * inv_res;

  int ci = static_cast<int>(std::floor(ux));
  int cj = static_cast<int>(std::floor(uy));
  const int step_i = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_j = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  double t_max_x = kInf, t_delta_x = kInf;
  if (step_i != 0) {
    const double boundary = step_i > 0 ? ci + 1.0 : static_cast<double>(ci);
    t_max_x = (boundary - ux) / dx;
    t_delta_x = std::abs(1.0 / dx);
  }
  double t_max_y = kInf, t_delta_y = kInf;
  if (step_j != 0) {
    const double boundary = step_j > 0 ? cj + 1.0 : static_cast<double>(cj);
    t_max_y = (boundary - uy) / dy;
    t_delta_y = std::abs(1.0 / dy);
  }

  if (!visit(CellIndex{ci, cj})) return false;
  constexpr double kTie = 1e-12;
  while (std::min(t_max_x, t_max_y) <= 1.0) {
    if (std::abs(t_max_x - t_max_y) <= kTie) {
      // Corner crossing: the two edge-adjacent cells are touched as well.
      if (!visit(CellIndex{ci + step_i, cj})) return false;
      if (!visit(CellIndex{ci, cj + step_j})) return false;
      ci += step_i;
      cj += step_j;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      ci += step_i;
      t_max_x += t_delta_x;
    } else {
      cj += step_j;
      t_max_y += t_delta_y;
    }
    if (!visit(CellIndex{ci, cj})) return false;
  }
  return true;
}

}  // namespace wbplan
