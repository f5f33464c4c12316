#pragma once

#include <istream>
#include <optional>
#include <vector>

#include "wbplan/geometry.hpp"
#include "wbplan/gridmap.hpp"
#include "wbplan/minco.hpp"

namespace wbplan {

/// Sum over t = 0, dt, ..., floor(T/dt) dt of (|p'''|^2 + |psi'''|^2) dt.
double dispersedJerk(const MincoTrajectory& traj, double dt);

struct TrajectoryStats {
  double duration = 0.0;
  double length = 0.0;        // planar arc length (m)
  double max_speed = 0.0;     // |(vx, vy)|
  double max_accel = 0.0;     // |(ax, ay)|
  double max_yaw_rate = 0.0;  // |psi_dot|
};

/// Statistics from samples every dt seconds (plus the end point).
TrajectoryStats trajectoryStats(const MincoTrajectory& traj, double dt);

/// One row of the exported trajectory CSV.
struct TrajectorySample {
  double t, x, y, psi, vx, vy, omega, ax, ay;
};

/// Parses the CSV written by writeTrajectoryCsv. Throws ParseError.
std::vector<TrajectorySample> readTrajectoryCsv(std::istream& in);

struct ValidationResult {
  bool collision_free = true;
  std::size_t samples = 0;
  std::optional<double> first_collision_time;
};

/// Whole-body collision check of every sample.
ValidationResult validateSamples(const OccupancyGrid& grid, const RobotShape& shape,
                                 const std::vector<TrajectorySample>& samples);

}  // namespace wbplan
