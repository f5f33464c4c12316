#include "wbplan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wbplan {

SvgTransform SvgTransform::fit(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
                               double max_size, double margin) {
  const double w = std::max(hi.x() - lo.x(), 1e-9);
  const double h = std::max(hi.y() - lo.y(), 1e-9);
  SvgTransform t;
  t.scale = max_size / std::max(w, h);
  t.page_width = w * t.scale + 2.0 * margin;
  t.page_height = h * t.scale + 2.0 * margin;
  t.offset_x = margin - lo.x() * t.scale;
  t.offset_y = margin + hi.y() * t.scale;
  return t;
}

Eigen::Vector2d SvgTransform::apply(const Eigen::Vector2d& world) const {
  return {offset_x + scale * world.x(), offset_y - scale * world.y()};
}

std::vector<double> footprintTimes(double duration, double interval) {
  std::vector<double> times;
  if (!(duration >= 0.0) || !(interval > 0.0)) return times;
  const auto n = static_cast<long>(std::floor(duration / interval));
  for (long k = 0; k <= n; ++k) times.push_back(k * interval);
  return times;
}

namespace {

struct Bounds {
  Eigen::Vector2d lo{std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
  Eigen::Vector2d hi = -lo;
  void add(const Eigen::Vector2d& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool valid() const { return lo.x() <= hi.x() && lo.y() <= hi.y(); }
};

std::vector<Eigen::Vector2d> pathPoints(const PathResult& path, double dt) {
  std::vector<Eigen::Vector2d> pts;
  if (path.states.empty()) return pts;
  const double total = path.duration();
  const auto n = static_cast<long>(std::ceil(total / dt));
  for (long k = 0; k <= n; ++k) pts.push_back(path.stateAt(std::min(k * dt, total)).position());
  return pts;
}

std::vector<Eigen::Vector2d> curvePoints(const MincoTrajectory& traj, double dt) {
  std::vector<Eigen::Vector2d> pts;
  if (traj.segmentCount() == 0) return pts;
  const double total = traj.totalDuration();
  const auto n = static_cast<long>(std::ceil(total / dt));
  for (long k = 0; k <= n; ++k) {
    const Eigen::Vector3d p = traj.eval(std::min(k * dt, total), 0);
    pts.emplace_back(p.x(), p.y());
  }
  return pts;
}

void writePoints(std::ostream& out, const SvgTransform& t,
                 const std::vector<Eigen::Vector2d>& pts) {
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Eigen::Vector2d q = t.apply(pts[k]);
    out << (k ? " " : "") << q.x() << ',' << q.y();
  }
}

}  // namespace

SvgTransform sceneTransform(const SvgScene& scene) {
  if (scene.grid) {
    return SvgTransform::fit(scene.grid->origin(), scene.grid->origin() + scene.grid->extent());
  }
  Bounds b;
  if (scene.path) {
    for (const auto& p : pathPoints(*scene.path, scene.curve_dt)) b.add(p);
  }
  if (scene.corridor) {
    for (const auto& seg : *scene.corridor) {
      for (const auto& v : seg.polygon.vertices()) b.add(v);
    }
  }
  if (scene.trajectory) {
    for (const auto& p : curvePoints(*scene.trajectory, scene.curve_dt)) b.add(p);
  }
  if (!b.valid()) return SvgTransform::fit({0.0, 0.0}, {1.0, 1.0});
  const Eigen::Vector2d pad = Eigen::Vector2d::Constant(std::max(scene.shape.length, 0.5));
  return SvgTransform::fit(b.lo - pad, b.hi + pad);
}

std::string renderSvg(const SvgScene& scene) {
  const SvgTransform t = sceneTransform(scene);
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << t.page_width << "\" height=\""
      << t.page_height << "\" viewBox=\"0 0 " << t.page_width << ' ' << t.page_height << "\">\n";
  out << "<rect id=\"frame\" x=\"0\" y=\"0\" width=\"" << t.page_width << "\" height=\""
      << t.page_height << "\" fill=\"white\" stroke=\"black\"/>\n";

  if (scene.grid) {
    // Horizontal runs of occupied cells keep the document small.
    const OccupancyGrid& g = *scene.grid;
    const double res = g.resolution();
    out << "<g id=\"occupancy\" fill=\"#333\">\n";
    for (int j = 0; j < g.height(); ++j) {
      int i = 0;
      while (i < g.width()) {
        if (!g.isOccupied(CellIndex{i, j})) {
          ++i;
          continue;
        }
        const int start = i;
        while (i < g.width() && g.isOccupied(CellIndex{i, j})) ++i;
        const Eigen::Vector2d top_left =
            t.apply(g.origin() + Eigen::Vector2d(start * res, (j + 1) * res));
        out << "<rect x=\"" << top_left.x() << "\" y=\"" << top_left.y() << "\" width=\""
            << (i - start) * res * t.scale << "\" height=\"" << res * t.scale << "\"/>\n";
      }
    }
    out << "</g>\n";
  }

  if (scene.corridor) {
    out << "<g id=\"corridor\" fill=\"#3a7bd5\" fill-opacity=\"0.15\" stroke=\"#3a7bd5\" "
           "stroke-opacity=\"0.5\">\n";
    for (const auto& seg : *scene.corridor) {
      out << "<polygon points=\"";
      writePoints(out, t, seg.polygon.vertices());
      out << "\"/>\n";
    }
    out << "</g>\n";
  }

  if (scene.path && !scene.path->states.empty()) {
    out << "<polyline id=\"path\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\" "
           "points=\"";
    writePoints(out, t, pathPoints(*scene.path, scene.curve_dt));
    out << "\"/>\n";
  }

  if (scene.trajectory && scene.trajectory->segmentCount() > 0) {
    const MincoTrajectory& traj = *scene.trajectory;
    out << "<polyline id=\"trajectory\" fill=\"none\" stroke=\"#d0312d\" stroke-width=\"2\" "
           "points=\"";
    writePoints(out, t, curvePoints(traj, scene.curve_dt));
    out << "\"/>\n";
    out << "<g id=\"footprints\" fill=\"none\" stroke=\"#2d8f3a\">\n";
    for (double time : footprintTimes(traj.totalDuration(), scene.footprint_interval)) {
      const Eigen::Vector3d p = traj.eval(time, 0);
      const auto corners = obbVertices(scene.shape, Pose2{p.x(), p.y(), p.z()});
      out << "<polygon points=\"";
      writePoints(out, t, {corners.begin(), corners.end()});
      out << "\"/>\n";
    }
    out << "</g>\n";
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace wbplan
