#include "wbplan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "wbplan/collision.hpp"
#include "wbplan/error.hpp"
#include "wbplan/metrics.hpp"

namespace wbplan {

const char* toString(Stage stage) noexcept {
  switch (stage) {
    case Stage::kNone: return "none";
    case Stage::kLoad: return "load";
    case Stage::kSearch: return "search";
    case Stage::kCorridor: return "corridor";
    case Stage::kOptimize: return "optimize";
    case Stage::kValidate: return "validate";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

BoundaryState boundary(const SearchState& s) {
  BoundaryState b = BoundaryState::Zero();
  b.col(0) << s.x, s.y, s.psi;
  b.col(1) << s.vx, s.vy, 0.0;
  return b;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunOutcome runPipeline(const Scenario& scenario, const OccupancyGrid& grid) {
  RunOutcome out;
  RunReport& rep = out.report;
  rep.scenario = scenario.name;
  const auto t0 = Clock::now();
  auto fail = [&](Stage stage, std::string why) {
    rep.success = false;
    rep.failed_stage = stage;
    rep.failure = std::move(why);
    rep.total_time = seconds(t0, Clock::now());
    return out;
  };

  // Search.
  out.artifacts.path = search(grid, scenario.shape, scenario.effectiveSearchLimits(),
                              scenario.start, scenario.goal, scenario.search_options);
  const auto t1 = Clock::now();
  rep.search_time = seconds(t0, t1);
  rep.expansions = out.artifacts.path.expansions;
  rep.path_cost = out.artifacts.path.cost;
  if (!out.artifacts.path.ok()) return fail(Stage::kSearch, toString(out.artifacts.path.status));

  // Corridor.
  try {
    out.artifacts.corridor = buildCorridor(grid, scenario.shape, out.artifacts.path,
                                           scenario.corridor);
  } catch (const Error& e) {
    rep.corridor_time = seconds(t1, Clock::now());
    return fail(Stage::kCorridor, toString(e.code()));
  }
  const auto t2 = Clock::now();
  rep.corridor_time = seconds(t1, t2);
  rep.constraint_points = static_cast<int>(out.artifacts.corridor.size());

  // Optimization. The tail follows the search path's unwrapped yaw.
  SearchState tail = out.artifacts.path.endState();
  tail.vx = scenario.goal.vx;
  tail.vy = scenario.goal.vy;
  try {
    OptimizationProblem prob = OptimizationProblem::fromCorridor(
        out.artifacts.corridor, scenario.shape, boundary(scenario.start), boundary(tail),
        scenario.limits, scenario.weights, scenario.optimizer);
    prob.grid = &grid;
    out.artifacts.optimized = optimize(prob);
  } catch (const Error& e) {
    rep.optimize_time = seconds(t2, Clock::now());
    return fail(Stage::kOptimize, toString(e.code()));
  }
  const auto t3 = Clock::now();
  rep.optimize_time = seconds(t2, t3);
  const OptimizedTrajectory& opt = *out.artifacts.optimized;
  rep.iterations = opt.iterations;
  rep.escalations = opt.escalations;

  const TrajectoryStats stats = trajectoryStats(opt.trajectory, scenario.sample_dt);
  rep.jerk_cost = dispersedJerk(opt.trajectory, scenario.jerk_dt);
  rep.length = stats.length;
  rep.duration = stats.duration;
  rep.max_speed = stats.max_speed;
  rep.max_accel = stats.max_accel;
  rep.max_yaw_rate = stats.max_yaw_rate;

  if (!opt.ok()) return fail(Stage::kOptimize, toString(opt.status));

  // Independent of the optimizer's own check: validate at the export rate.
  rep.collision_free =
      trajectoryCollisionFree(grid, scenario.shape, opt.trajectory, scenario.sample_dt);
  if (!rep.collision_free) return fail(Stage::kValidate, "collision");

  rep.success = true;
  rep.total_time = seconds(t0, Clock::now());
  return out;
}

RunOutcome runScenario(const Scenario& scenario, int repeat) {
  OccupancyGrid grid = [&] {
    try {
      return loadMapFile(scenario.map_path);
    } catch (const Error&) {
      throw;
    }
  }();
  const int n = repeat > 0 ? repeat : std::max(1, scenario.repeat);
  RunOutcome first = runPipeline(scenario, grid);
  std::vector<double> search_t{first.report.search_time}, corridor_t{first.report.corridor_time},
      optimize_t{first.report.optimize_time}, total_t{first.report.total_time};
  for (int k = 1; k < n; ++k) {
    const RunOutcome again = runPipeline(scenario, grid);
    search_t.push_back(again.report.search_time);
    corridor_t.push_back(again.report.corridor_time);
    optimize_t.push_back(again.report.optimize_time);
    total_t.push_back(again.report.total_time);
  }
  first.report.search_time = median(search_t);
  first.report.corridor_time = median(corridor_t);
  first.report.optimize_time = median(optimize_t);
  first.report.total_time = median(total_t);
  first.report.repeats = n;
  return first;
}

namespace {

nlohmann::ordered_json toJson(const RunReport& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["success"] = r.success;
  j["failed_stage"] = toString(r.failed_stage);
  j["failure"] = r.failure;
  if (with_timing) {
    j["search_time"] = r.search_time;
    j["corridor_time"] = r.corridor_time;
    j["optimize_time"] = r.optimize_time;
    j["total_time"] = r.total_time;
    j["repeats"] = r.repeats;
  }
  j["expansions"] = r.expansions;
  j["path_cost"] = r.path_cost;
  j["constraint_points"] = r.constraint_points;
  j["iterations"] = r.iterations;
  j["escalations"] = r.escalations;
  j["jerk_cost"] = r.jerk_cost;
  j["length"] = r.length;
  j["duration"] = r.duration;
  j["max_speed"] = r.max_speed;
  j["max_accel"] = r.max_accel;
  j["max_yaw_rate"] = r.max_yaw_rate;
  j["collision_free"] = r.collision_free;
  return j;
}

}  // namespace

void writeReportJson(std::ostream& out, const RunReport& report) {
  out << toJson(report, true).dump(2) << '\n';
}

std::string reportJson(const RunReport& report) { return toJson(report, true).dump(2); }

std::string reportFingerprint(const RunReport& report) { return toJson(report, false).dump(); }

void writePathCsv(std::ostream& out, const PathResult& path, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  out << "t,x,y,psi,vx,vy\n" << std::setprecision(12);
  const double total = path.duration();
  const auto n = static_cast<long>(std::ceil(total / dt - 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double t = std::min(k * dt, total);
    const SearchState s = path.stateAt(t);
    out << t << ',' << s.x << ',' << s.y << ',' << s.psi << ',' << s.vx << ',' << s.vy << '\n';
  }
}

}  // namespace wbplan
