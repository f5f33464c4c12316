#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbplan/metrics.hpp"
#include "wbplan/pipeline.hpp"
#include "wbplan/svg.hpp"

using namespace wbplan;

namespace {

Scenario bundled(const std::string& name) {
  return loadScenarioFile(std::filesystem::path(WBPLAN_SCENARIO_DIR) / (name + ".scn"));
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

}  // namespace

TEST(Pipeline, OpenMap) {
  const Scenario sc = bundled("open");
  const RunOutcome run = runScenario(sc, 1);
  ASSERT_TRUE(run.report.success) << toString(run.report.failed_stage);
  EXPECT_TRUE(run.report.collision_free);
  EXPECT_LT(run.report.jerk_cost, 5.0);
  EXPECT_NEAR(run.report.length, 8.0, 0.05);
  const auto& traj = run.artifacts.optimized->trajectory;
  for (double t = 0; t <= traj.totalDuration(); t += 0.05) {
    EXPECT_NEAR(traj.eval(t, 0).y(), 3.0, 0.05);
  }
}

TEST(Pipeline, GoalInWallFailsAtSearch) {
  const RunOutcome run = runScenario(bundled("goal_in_wall"), 1);
  EXPECT_FALSE(run.report.success);
  EXPECT_EQ(run.report.failed_stage, Stage::kSearch);
  EXPECT_EQ(run.report.failure, "no-path");
}

TEST(Pipeline, ReportIsDeterministic) {
  const Scenario sc = bundled("open");
  const OccupancyGrid grid = loadMapFile(sc.map_path);
  const RunOutcome a = runPipeline(sc, grid);
  const RunOutcome b = runPipeline(sc, grid);
  EXPECT_EQ(reportFingerprint(a.report), reportFingerprint(b.report));
  const std::string json = reportJson(a.report);
  for (const char* key : {"\"search_time\"", "\"optimize_time\"", "\"jerk_cost\"", "\"length\"",
                          "\"duration\"", "\"max_speed\"", "\"collision_free\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
}

TEST(Pipeline, PathCsv) {
  const Scenario sc = bundled("open");
  const RunOutcome run = runScenario(sc, 1);
  std::ostringstream out;
  writePathCsv(out, run.artifacts.path, 0.1);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "t,x,y,psi,vx,vy");
}

TEST(Svg, FrameOnly) {
  const std::string svg = renderSvg(SvgScene{});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("id=\"frame\""), std::string::npos);
  EXPECT_EQ(count(svg, "<polygon"), 0);
  EXPECT_EQ(count(svg, "<polyline"), 0);
}

TEST(Svg, FootprintCount) {
  for (double duration : {0.0, 0.49, 0.5, 2.3, 10.0}) {
    EXPECT_EQ(footprintTimes(duration, 0.5).size(),
              static_cast<std::size_t>(std::floor(duration / 0.5)) + 1);
  }
  BoundaryState head = BoundaryState::Zero(), tail = BoundaryState::Zero();
  tail.col(0) << 2.0, 1.0, 0.5;
  const auto traj = MincoTrajectory::construct(head, tail, Eigen::Matrix3Xd(3, 0),
                                               Eigen::VectorXd::Ones(1) * 2.3);
  SvgScene scene;
  scene.trajectory = &traj;
  scene.footprint_interval = 0.5;
  const std::string svg = renderSvg(scene);
  EXPECT_EQ(count(svg, "<polygon"), 5);
}

TEST(Svg, FootprintCornersUseSharedTransform) {
  const OccupancyGrid grid = OccupancyGrid::uniform(40, 20, 0.1);
  BoundaryState head = BoundaryState::Zero(), tail = BoundaryState::Zero();
  head.col(0) << 1.0, 1.0, 0.3;
  tail.col(0) << 3.0, 1.2, 0.6;
  const auto traj = MincoTrajectory::construct(head, tail, Eigen::Matrix3Xd(3, 0),
                                               Eigen::VectorXd::Ones(1) * 1.0);
  SvgScene scene;
  scene.grid = &grid;
  scene.trajectory = &traj;
  scene.shape = RobotShape{0.5, 0.2, 5};
  scene.footprint_interval = 10.0;  // only t = 0
  const std::string svg = renderSvg(scene);
  const SvgTransform tf = sceneTransform(scene);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex("<g id=\"footprints\"[^>]*>\\s*<polygon points=\"([^\"]*)\"")));
  std::istringstream pts(m[1].str());
  const auto corners = obbVertices(scene.shape, Pose2{1.0, 1.0, 0.3});
  for (const auto& c : corners) {
    double x, y;
    char comma;
    ASSERT_TRUE(pts >> x >> comma >> y);
    const Eigen::Vector2d expect = tf.apply(c);
    EXPECT_NEAR(x, expect.x(), 1e-5);
    EXPECT_NEAR(y, expect.y(), 1e-5);
  }
  // Aspect ratio preserved and y flipped.
  const Eigen::Vector2d a = tf.apply({0, 0}), b = tf.apply({1, 1});
  EXPECT_NEAR(b.x() - a.x(), a.y() - b.y(), 1e-12);
}

TEST(Svg, OccupiedRuns) {
  OccupancyGrid grid = OccupancyGrid::uniform(10, 3, 1.0);
  grid.fillBox({2, 1}, {5, 2});  // one run of 4 cells in row 1
  grid.setOccupied({8, 0}, true);
  SvgScene scene;
  scene.grid = &grid;
  const std::string svg = renderSvg(scene);
  const auto begin = svg.find("<g id=\"occupancy\"");
  const auto end = svg.find("</g>", begin);
  EXPECT_EQ(count(svg.substr(begin, end - begin), "<rect"), 2);
}
