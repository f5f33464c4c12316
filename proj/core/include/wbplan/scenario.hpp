#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "wbplan/corridor.hpp"
#include "wbplan/geometry.hpp"
#include "wbplan/optimizer.hpp"
#include "wbplan/penalties.hpp"
#include "wbplan/search.hpp"

namespace wbplan {

/// Everything one planning run needs. Loaded from a flat "key = value" text
/// file; every field has a default.
struct Scenario {
  std::string name = "scenario";
  std::filesystem::path map_path;  // resolved against the scenario file's directory
  RobotShape shape{0.5, 0.2, 5};
  SearchState start;
  SearchState goal;
  DynamicLimits limits;
  SearchLimits search;  // v/a/w limits and rho are copied from `limits`/`weights`
  SearchOptions search_options;
  CorridorParams corridor;
  PenaltyWeights weights;
  OptimizerSettings optimizer;
  double sample_dt = 0.01;          // trajectory CSV / validation period
  double jerk_dt = 0.01;            // dispersed-jerk period
  double footprint_interval = 0.5;  // SVG footprint spacing (s)
  int repeat = 5;                   // timing repetitions

  /// Search limits with the scenario's shared values filled in.
  SearchLimits effectiveSearchLimits() const;
};

/// Throws ParseError on unknown keys or malformed values.
Scenario parseScenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario loadScenarioFile(const std::filesystem::path& path);

}  // namespace wbplan
