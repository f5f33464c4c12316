#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wbplan/corridor.hpp"
#include "wbplan/gridmap.hpp"
#include "wbplan/optimizer.hpp"
#include "wbplan/scenario.hpp"
#include "wbplan/search.hpp"

namespace wbplan {

enum class Stage {
  kNone,
  kLoad,
  kSearch,
  kCorridor,
  kOptimize,
  kValidate,
};

const char* toString(Stage stage) noexcept;

struct RunReport {
  std::string scenario;
  bool success = false;
  Stage failed_stage = Stage::kNone;
  std::string failure;  // stage-specific reason, e.g. "no-path"

  // Timing (seconds, medians over the repeat count).
  double search_time = 0.0;
  double corridor_time = 0.0;
  double optimize_time = 0.0;
  double total_time = 0.0;
  int repeats = 1;

  // Search / corridor / optimizer counters.
  std::size_t expansions = 0;
  double path_cost = 0.0;
  int constraint_points = 0;
  int iterations = 0;
  int escalations = 0;

  // Trajectory metrics.
  double jerk_cost = 0.0;  // dispersed jerk
  double length = 0.0;
  double duration = 0.0;
  double max_speed = 0.0;
  double max_accel = 0.0;
  double max_yaw_rate = 0.0;
  bool collision_free = false;
};

struct RunArtifacts {
  PathResult path;
  std::vector<CorridorSegment> corridor;
  std::optional<OptimizedTrajectory> optimized;
};

struct RunOutcome {
  RunReport report;
  RunArtifacts artifacts;
};

/// search -> constraint points -> corridor -> optimize -> validate, timed
/// once. Never throws for stage failures; the report names the failing stage.
RunOutcome runPipeline(const Scenario& scenario, const OccupancyGrid& grid);

/// Loads the map, runs the pipeline scenario.repeat times (or `repeat` when
/// positive) and reports median timings with the first run's artifacts.
RunOutcome runScenario(const Scenario& scenario, int repeat = 0);

/// JSON object with every report field.
void writeReportJson(std::ostream& out, const RunReport& report);
std::string reportJson(const RunReport& report);
/// Same, without timing fields; identical inputs give identical text.
std::string reportFingerprint(const RunReport& report);

/// "t,x,y,psi,vx,vy" rows of the search path sampled every dt.
void writePathCsv(std::ostream& out, const PathResult& path, double dt);

}  // namespace wbplan
