#pragma once

#include "wbplan/geometry.hpp"
#include "wbplan/gridmap.hpp"

namespace wbplan {

/// Boundary-only test: true iff any cell under one of the four box edges is
/// occupied.
bool obbEdgesHitObstacle(const OccupancyGrid& grid, const RobotShape& shape, const Pose2& pose);

/// Whole-body test used everywhere a collision verdict is needed. Checks the
/// box edges first, then the center cell, then every remaining cell the box
/// covers, so obstacles fully enclosed by the footprint are also caught.
bool poseInCollision(const OccupancyGrid& grid, const RobotShape& shape, const Pose2& pose);

}  // namespace wbplan
