#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "wbplan/geometry.hpp"
#include "wbplan/gridmap.hpp"
#include "wbplan/search.hpp"

namespace wbplan {

struct ConstraintPoint {
  Pose2 pose;
  double time = 0.0;  // time along the search path
};

/// Poses spaced `spacing` meters apart in arc length along the path, starting
/// at its first pose and always ending with its last one.
std::vector<ConstraintPoint> sampleConstraintPoints(const PathResult& path, double spacing);

struct CorridorParams {
  double spacing = 0.3;     // constraint-point arc-length spacing
  double step = 0.0;        // face growth step; <= 0 means grid resolution
  double max_expand = 2.0;  // per-face cap
};

/// Rotated rectangle grown from the robot box at one constraint point.
struct CorridorSegment {
  Pose2 anchor;
  double time = 0.0;
  ConvexPolygon polygon;              // faces: +x, +y, -x, -y of the anchor body frame
  std::array<double, 4> expansion{};  // growth of each face beyond the box
};

/// Pushes each box face outward along its normal, one step per face per
/// round, until the swept strip touches an occupied cell or max_expand is
/// reached. Throws Error(kInvalidAnchor) when the anchor box is in collision.
CorridorSegment expandObb(const OccupancyGrid& grid, const RobotShape& shape, const Pose2& anchor,
                          double step, double max_expand);

std::vector<CorridorSegment> buildCorridor(const OccupancyGrid& grid, const RobotShape& shape,
                                           const PathResult& path, const CorridorParams& params);

/// One polygon per line: "x0 y0 x1 y1 ..." world-frame vertices.
void writeCorridor(std::ostream& out, const std::vector<CorridorSegment>& corridor);

}  // namespace wbplan
