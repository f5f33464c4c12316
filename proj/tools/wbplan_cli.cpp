// wbplan: plan / batch / validate front end.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wbplan/error.hpp"
#include "wbplan/metrics.hpp"
#include "wbplan/pipeline.hpp"
#include "wbplan/scenario.hpp"
#include "wbplan/svg.hpp"

namespace fs = std::filesystem;
using namespace wbplan;

namespace {

std::ofstream openOut(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void writeArtifacts(const Scenario& sc, const RunOutcome& run, const fs::path& dir, bool svg) {
  fs::create_directories(dir);
  {
    auto out = openOut(dir / "report.json");
    writeReportJson(out, run.report);
  }
  const RunArtifacts& art = run.artifacts;
  if (!art.path.states.empty()) {
    auto out = openOut(dir / "path.csv");
    writePathCsv(out, art.path, sc.sample_dt);
  }
  if (!art.corridor.empty()) {
    auto out = openOut(dir / "corridor.txt");
    writeCorridor(out, art.corridor);
  }
  if (art.optimized) {
    auto traj = openOut(dir / "trajectory.csv");
    writeTrajectoryCsv(traj, art.optimized->trajectory, sc.sample_dt);
    auto diag = openOut(dir / "diagnostics.csv");
    writeDiagnosticsCsv(diag, art.optimized->history);
  }
  if (svg) {
    const OccupancyGrid grid = loadMapFile(sc.map_path);
    SvgScene scene;
    scene.grid = &grid;
    scene.path = art.path.states.empty() ? nullptr : &art.path;
    scene.corridor = art.corridor.empty() ? nullptr : &art.corridor;
    scene.trajectory = art.optimized ? &art.optimized->trajectory : nullptr;
    scene.shape = sc.shape;
    scene.footprint_interval = sc.footprint_interval;
    auto out = openOut(dir / "scene.svg");
    out << renderSvg(scene);
  }
}

void printSummary(const RunReport& r) {
  if (r.success) {
    std::printf("%s: ok  search %.3fs  optimize %.3fs  total %.3fs  jerk %.3f  length %.2fm  "
                "duration %.2fs\n",
                r.scenario.c_str(), r.search_time, r.optimize_time, r.total_time, r.jerk_cost,
                r.length, r.duration);
  } else {
    std::printf("%s: FAILED at stage %s (%s)\n", r.scenario.c_str(), toString(r.failed_stage),
                r.failure.c_str());
  }
}

int cmdPlan(const std::string& scenario_path, const std::string& out_dir, bool svg, int repeat) {
  const Scenario sc = loadScenarioFile(scenario_path);
  RunOutcome run;
  try {
    run = runScenario(sc, repeat);
  } catch (const Error& e) {
    run.report.scenario = sc.name;
    run.report.failed_stage = Stage::kLoad;
    run.report.failure = e.what();
  }
  writeArtifacts(sc, run, out_dir, svg);
  printSummary(run.report);
  return run.report.success ? 0 : 1;
}

int cmdBatch(const std::string& dir, const std::string& out_dir, int jobs, int repeat, bool svg) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scn") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::fprintf(stderr, "no .scn files in %s\n", dir.c_str());
    return 1;
  }

  std::vector<RunReport> reports(files.size());
  std::atomic<std::size_t> next{0};
  std::mutex print_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < files.size(); k = next++) {
      RunReport& rep = reports[k];
      try {
        const Scenario sc = loadScenarioFile(files[k]);
        RunOutcome run;
        try {
          run = runScenario(sc, repeat);
        } catch (const Error& e) {
          run.report.scenario = sc.name;
          run.report.failed_stage = Stage::kLoad;
          run.report.failure = e.what();
        }
        if (!out_dir.empty()) writeArtifacts(sc, run, fs::path(out_dir) / sc.name, svg);
        rep = run.report;
      } catch (const std::exception& e) {
        rep.scenario = files[k].stem().string();
        rep.failed_stage = Stage::kLoad;
        rep.failure = e.what();
      }
      std::lock_guard lock(print_mutex);
      printSummary(rep);
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::sort(reports.begin(), reports.end(),
            [](const RunReport& a, const RunReport& b) { return a.scenario < b.scenario; });
  auto merged = nlohmann::ordered_json::array();
  bool all_ok = true;
  for (const auto& r : reports) {
    merged.push_back(nlohmann::ordered_json::parse(reportJson(r)));
    all_ok = all_ok && r.success;
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto out = openOut(fs::path(out_dir) / "batch_report.json");
    out << merged.dump(2) << '\n';
  } else {
    std::cout << merged.dump(2) << '\n';
  }
  return all_ok ? 0 : 1;
}

RobotShape parseShape(const std::string& text) {
  RobotShape shape;
  char sep = 0;
  std::istringstream ss(text);
  if (!(ss >> shape.length >> sep >> shape.width) || (sep != 'x' && sep != ',')) {
    throw Error(ErrorCode::kInvalidArgument, "shape must look like <length>x<width>");
  }
  shape.validate();
  return shape;
}

int cmdValidate(const std::string& map_path, const std::string& csv_path,
                const std::string& shape_text) {
  const OccupancyGrid grid = loadMapFile(map_path);
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path);
  const auto samples = readTrajectoryCsv(in);
  const ValidationResult res = validateSamples(grid, parseShape(shape_text), samples);
  if (res.collision_free) {
    std::printf("collision-free (%zu samples)\n", res.samples);
    return 0;
  }
  std::printf("collision at t = %.4f s\n", res.first_collision_time.value_or(0.0));
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whole-body kinodynamic planner for elongated rotorcraft"};
  app.require_subcommand(1);

  std::string scenario, out_dir = "out";
  bool svg = false;
  int repeat = 0;
  auto* plan = app.add_subcommand("plan", "Run one scenario and write its artifacts");
  plan->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  plan->add_option("--out", out_dir, "Output directory");
  plan->add_flag("--svg", svg, "Also render scene.svg");
  plan->add_option("--repeat", repeat, "Timing repetitions (default from scenario)")
      ->check(CLI::PositiveNumber);

  std::string batch_dir, batch_out;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* batch = app.add_subcommand("batch", "Run every .scn file in a directory");
  batch->add_option("dir", batch_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  batch->add_option("--out", batch_out, "Write per-scenario artifacts and batch_report.json here");
  batch->add_option("--jobs,-j", jobs, "Parallel workers")->check(CLI::PositiveNumber);
  batch->add_option("--repeat", repeat, "Timing repetitions")->check(CLI::PositiveNumber);
  batch->add_flag("--svg", svg, "Render scene.svg per scenario");

  std::string map_path, csv_path, shape_text;
  auto* validate = app.add_subcommand("validate", "Check an exported trajectory against a map");
  validate->add_option("map", map_path, "Map file")->required()->check(CLI::ExistingFile);
  validate->add_option("trajectory", csv_path, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  validate->add_option("shape", shape_text, "Robot shape <length>x<width>")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return cmdPlan(scenario, out_dir, svg, repeat);
    if (*batch) return cmdBatch(batch_dir, batch_out, jobs, repeat, svg);
    if (*validate) return cmdValidate(map_path, csv_path, shape_text);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
