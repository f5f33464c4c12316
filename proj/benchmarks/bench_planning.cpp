#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>

#include "wbplan/collision.hpp"
#include "wbplan/corridor.hpp"
#include "wbplan/optimizer.hpp"
#include "wbplan/pipeline.hpp"
#include "wbplan/scenario.hpp"

namespace {

using namespace wbplan;

struct Fixture {
  Scenario scenario;
  OccupancyGrid grid;
  PathResult path;
  std::vector<CorridorSegment> corridor;
  OptimizationProblem problem;

  Fixture()
      : scenario(loadScenarioFile(std::filesystem::path(WBPLAN_SCENARIO_DIR) / "narrow_s.scn")),
        grid(loadMapFile(scenario.map_path)) {
    path = search(grid, scenario.shape, scenario.effectiveSearchLimits(), scenario.start,
                  scenario.goal, scenario.search_options);
    corridor = buildCorridor(grid, scenario.shape, path, scenario.corridor);
    BoundaryState tail = BoundaryState::Zero();
    const SearchState end = path.endState();
    tail.col(0) << end.x, end.y, end.psi;
    problem = OptimizationProblem::fromCorridor(corridor, scenario.shape,
                                                BoundaryState::Zero(), tail, scenario.limits,
                                                scenario.weights, scenario.optimizer);
    problem.head.col(0) << scenario.start.x, scenario.start.y, scenario.start.psi;
    problem.grid = &grid;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_PoseCollision(benchmark::State& state) {
  const Fixture& f = fixture();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(f.grid.origin().x(), f.grid.origin().x() + f.grid.extent().x()),
      y(f.grid.origin().y(), f.grid.origin().y() + f.grid.extent().y()),
      psi(-3.14, 3.14);
  std::vector<Pose2> poses(1024);
  for (auto& p : poses) p = {x(rng), y(rng), psi(rng)};
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(poseInCollision(f.grid, f.scenario.shape, poses[k++ & 1023]));
  }
}
BENCHMARK(BM_PoseCollision);

void BM_Search(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(search(f.grid, f.scenario.shape, f.scenario.effectiveSearchLimits(),
                                    f.scenario.start, f.scenario.goal, f.scenario.search_options));
  }
}
BENCHMARK(BM_Search)->Unit(benchmark::kMillisecond);

void BM_Corridor(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(buildCorridor(f.grid, f.scenario.shape, f.path, f.scenario.corridor));
  }
}
BENCHMARK(BM_Corridor)->Unit(benchmark::kMillisecond);

void BM_Objective(benchmark::State& state) {
  const Fixture& f = fixture();
  const Eigen::VectorXd x = packDecision(f.problem.initial_waypoints, f.problem.initial_times);
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(totalObjective(f.problem, x, grad));
  state.counters["segments"] = f.problem.segmentCount();
}
BENCHMARK(BM_Objective)->Unit(benchmark::kMicrosecond);

void BM_Optimize(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(optimize(f.problem));
}
BENCHMARK(BM_Optimize)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
