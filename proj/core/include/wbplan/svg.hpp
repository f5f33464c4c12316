#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "wbplan/corridor.hpp"
#include "wbplan/geometry.hpp"
#include "wbplan/gridmap.hpp"
#include "wbplan/minco.hpp"
#include "wbplan/search.hpp"

namespace wbplan {

/// World-to-page map: uniform scale, y flipped, margin on every side.
struct SvgTransform {
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;
  double page_width = 0.0;
  double page_height = 0.0;

  /// Fits the world rectangle [lo, hi] into `max_size` pixels along its
  /// longer side.
  static SvgTransform fit(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
                          double max_size = 1000.0, double margin = 10.0);
  Eigen::Vector2d apply(const Eigen::Vector2d& world) const;
};

/// Every layer is optional; pass nullptr to omit it.
struct SvgScene {
  const OccupancyGrid* grid = nullptr;
  const PathResult* path = nullptr;
  const std::vector<CorridorSegment>* corridor = nullptr;
  const MincoTrajectory* trajectory = nullptr;
  RobotShape shape;
  double footprint_interval = 0.5;  // seconds between drawn footprints
  double curve_dt = 0.02;
};

/// Footprint times along a trajectory of the given duration:
/// floor(duration / interval) + 1 of them, starting at 0.
std::vector<double> footprintTimes(double duration, double interval);

/// The transform renderSvg uses: the grid extent when present, else the
/// bounding box of the other layers, else the unit square.
SvgTransform sceneTransform(const SvgScene& scene);

std::string renderSvg(const SvgScene& scene);

}  // namespace wbplan
