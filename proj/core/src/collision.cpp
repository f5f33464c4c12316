#include "wbplan/collision.hpp"

namespace wbplan {

bool obbEdgesHitObstacle(const OccupancyGrid& grid, const RobotShape& shape, const Pose2& pose) {
  const auto v = obbVertices(shape, pose);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (grid.segmentHitsObstacle(v[k], v[(k + 1) % v.size()])) return true;
  }
  return false;
}

bool poseInCollision(const OccupancyGrid& grid, const RobotShape& shape, const Pose2& pose) {
  if (obbEdgesHitObstacle(grid, shape, pose)) return true;
  if (grid.isOccupied(pose.position())) return true;
  const auto v = obbVertices(shape, pose);
  return grid.convexPolygonHitsObstacle(v);
}

}  // namespace wbplan
