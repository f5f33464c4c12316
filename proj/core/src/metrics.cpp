#include "wbplan/metrics.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "wbplan/collision.hpp"
#include "wbplan/error.hpp"

namespace wbplan {

double dispersedJerk(const MincoTrajectory& traj, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  const double total = traj.totalDuration();
  const auto n = static_cast<long>(std::floor(total / dt + 1e-9));
  double sum = 0.0;
  for (long i = 0; i <= n; ++i) {
    sum += traj.eval(std::min(i * dt, total), 3).squaredNorm() * dt;
  }
  return sum;
}

TrajectoryStats trajectoryStats(const MincoTrajectory& traj, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  TrajectoryStats stats;
  stats.duration = traj.totalDuration();
  const auto n = static_cast<long>(std::ceil(stats.duration / dt - 1e-9));
  Eigen::Vector2d prev = traj.eval(0.0, 0).head<2>();
  for (long k = 0; k <= n; ++k) {
    const double t = std::min(k * dt, stats.duration);
    const Eigen::Vector3d p = traj.eval(t, 0), v = traj.eval(t, 1), a = traj.eval(t, 2);
    stats.length += (p.head<2>() - prev).norm();
    prev = p.head<2>();
    stats.max_speed = std::max(stats.max_speed, v.head<2>().norm());
    stats.max_accel = std::max(stats.max_accel, a.head<2>().norm());
    stats.max_yaw_rate = std::max(stats.max_yaw_rate, std::abs(v.z()));
  }
  return stats;
}

std::vector<TrajectorySample> readTrajectoryCsv(std::istream& in) {
  std::vector<TrajectorySample> out;
  std::string line;
  std::size_t line_no = 0, offset = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("t,", 0) == 0) continue;
    }
    std::array<double, 9> v{};
    std::istringstream ss(line);
    std::string field;
    std::size_t k = 0;
    while (std::getline(ss, field, ',')) {
      if (k >= v.size()) throw ParseError("too many columns", line_no, line_offset);
      try {
        std::size_t used = 0;
        v[k] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + field + "'", line_no, line_offset);
      }
      ++k;
    }
    if (k != v.size()) throw ParseError("expected 9 columns", line_no, line_offset);
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  return out;
}

ValidationResult validateSamples(const OccupancyGrid& grid, const RobotShape& shape,
                                 const std::vector<TrajectorySample>& samples) {
  ValidationResult res;
  for (const auto& s : samples) {
    ++res.samples;
    if (poseInCollision(grid, shape, Pose2{s.x, s.y, s.psi})) {
      res.collision_free = false;
      if (!res.first_collision_time) res.first_collision_time = s.t;
    }
  }
  return res;
}

}  // namespace wbplan
