#include "wbplan/corridor.hpp"

#include <algorithm>
#include <cmath>

#include "wbplan/collision.hpp"
#include "wbplan/error.hpp"

namespace wbplan {

std::vector<ConstraintPoint> sampleConstraintPoints(const PathResult& path, double spacing) {
  if (path.states.empty()) throw Error(ErrorCode::kInvalidArgument, "path is empty");
  if (!(spacing > 0.0)) throw Error(ErrorCode::kInvalidArgument, "spacing must be positive");

  // Dense time samples with cumulative arc length.
  std::vector<double> times{0.0};
  auto add_piece = [&](double t0, double duration, int substeps) {
    for (int k = 1; k <= substeps; ++k) times.push_back(t0 + duration * k / substeps);
  };
  double t0 = 0.0;
  for (const auto& prim : path.primitives) {
    add_piece(t0, prim.duration, 20);
    t0 += prim.duration;
  }
  if (path.shot) {
    add_piece(t0, path.shot->duration,
              std::max(20, static_cast<int>(std::ceil(path.shot->duration / 0.01))));
  }
  std::vector<double> arc(times.size(), 0.0);
  std::vector<Eigen::Vector2d> pos(times.size());
  pos[0] = path.stateAt(0.0).position();
  for (std::size_t k = 1; k < times.size(); ++k) {
    pos[k] = path.stateAt(times[k]).position();
    arc[k] = arc[k - 1] + (pos[k] - pos[k - 1]).norm();
  }
  const double total = arc.back();

  std::vector<ConstraintPoint> out;
  out.push_back({path.stateAt(0.0).pose(), 0.0});
  std::size_t seg = 1;
  for (int k = 1;; ++k) {
    const double s = spacing * k;
    if (s >= total - 1e-6 * spacing) break;
    while (seg + 1 < arc.size() && arc[seg] < s) ++seg;
    const double ds = arc[seg] - arc[seg - 1];
    const double w = ds > 0.0 ? (s - arc[seg - 1]) / ds : 1.0;
    double t = times[seg - 1] + w * (times[seg] - times[seg - 1]);
    // Interpolation on the sampled polyline can overshoot the chord slightly.
    const Eigen::Vector2d prev = out.back().pose.position();
    if ((path.stateAt(t).position() - prev).norm() > spacing) {
      double lo = out.back().time, hi = t;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((path.stateAt(mid).position() - prev).norm() > spacing ? hi : lo) = mid;
      }
      t = lo;
    }
    out.push_back({path.stateAt(t).pose(), t});
  }

  const double t_end = times.back();
  const Pose2 end = path.stateAt(t_end).pose();
  const Pose2& last = out.back().pose;
  if (std::hypot(end.x - last.x, end.y - last.y) > 1e-9 || std::abs(end.psi - last.psi) > 1e-9) {
    out.push_back({end, t_end});
  }
  return out;
}

namespace {

const std::array<Eigen::Vector2d, 4> kBodyNormals{
    Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(-1.0, 0.0),
    Eigen::Vector2d(0.0, -1.0)};

}  // namespace

CorridorSegment expandObb(const OccupancyGrid& grid, const RobotShape& shape, const Pose2& anchor,
                          double step, double max_expand) {
  shape.validate();
  if (poseInCollision(grid, shape, anchor)) {
    throw Error(ErrorCode::kInvalidAnchor, "corridor anchor box is in collision");
  }
  if (!(step > 0.0)) step = grid.resolution();
  max_expand = std::max(max_expand, 0.0);

  const Eigen::Matrix2d rot = rotation(anchor.psi);
  const Eigen::Vector2d center = anchor.position();
  const std::array<double, 4> half{0.5 * shape.length, 0.5 * shape.width, 0.5 * shape.length,
                                   0.5 * shape.width};
  std::array<double, 4> grow{0.0, 0.0, 0.0, 0.0};
  auto extent = [&](int k) { return half[k] + grow[k]; };

  // Body-frame point on face k at distance `offset` from the center, with
  // lateral coordinate `lat` along the face (counterclockwise positive).
  auto face_point = [&](int k, double offset, double lat) -> Eigen::Vector2d {
    const Eigen::Vector2d& n = kBodyNormals[k];
    const Eigen::Vector2d tangent(-n.y(), n.x());
    return rot * (n * offset + tangent * lat) + center;
  };
  // Lateral range of face k is bounded by faces k+1 (positive side) and k+3.
  auto face_hits = [&](int k, double offset) {
    const double lat_hi = extent((k + 1) % 4);
    const double lat_lo = -extent((k + 3) % 4);
    return grid.segmentHitsObstacle(face_point(k, offset, lat_lo), face_point(k, offset, lat_hi));
  };

  const double sub = 0.5 * std::min(step, grid.resolution());
  std::array<bool, 4> active{true, true, true, true};
  while (std::any_of(active.begin(), active.end(), [](bool a) { return a; })) {
    for (int k = 0; k < 4; ++k) {
      if (!active[k]) continue;
      const double from = extent(k);
      const double target = std::min(grow[k] + step, max_expand);
      if (target <= grow[k]) {
        active[k] = false;
        continue;
      }
      const double to = half[k] + target;
      bool blocked = false;
      // Strip sides along the neighbouring faces.
      const double lat_hi = extent((k + 1) % 4);
      const double lat_lo = -extent((k + 3) % 4);
      if (grid.segmentHitsObstacle(face_point(k, from, lat_hi), face_point(k, to, lat_hi)) ||
          grid.segmentHitsObstacle(face_point(k, from, lat_lo), face_point(k, to, lat_lo))) {
        blocked = true;
      }
      const int lines = std::max(1, static_cast<int>(std::ceil((to - from) / sub - 1e-9)));
      for (int m = 1; m <= lines && !blocked; ++m) {
        blocked = face_hits(k, from + (to - from) * m / lines);
      }
      if (blocked) {
        active[k] = false;
      } else {
        grow[k] = target;
        if (grow[k] >= max_expand) active[k] = false;
      }
    }
  }

  std::vector<Eigen::Vector2d> normals;
  std::vector<double> offsets;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector2d n = rot * kBodyNormals[k];
    normals.push_back(n);
    offsets.push_back(n.dot(center) + extent(k));
  }
  CorridorSegment seg;
  seg.anchor = anchor;
  seg.polygon = ConvexPolygon(std::move(normals), std::move(offsets));
  seg.expansion = grow;
  return seg;
}

std::vector<CorridorSegment> buildCorridor(const OccupancyGrid& grid, const RobotShape& shape,
                                           const PathResult& path, const CorridorParams& params) {
  const auto points = sampleConstraintPoints(path, params.spacing);
  std::vector<CorridorSegment> out;
  out.reserve(points.size());
  for (const auto& cp : points) {
    out.push_back(expandObb(grid, shape, cp.pose, params.step, params.max_expand));
    out.back().time = cp.time;
  }
  return out;
}

void writeCorridor(std::ostream& out, const std::vector<CorridorSegment>& corridor) {
  for (const auto& seg : corridor) {
    const auto verts = seg.polygon.vertices();
    for (std::size_t k = 0; k < verts.size(); ++k) {
      if (k) out << ' ';
      out << verts[k].x() << ' ' << verts[k].y();
    }
    out << '\n';
  }
}

}  // namespace wbplan
