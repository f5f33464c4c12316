#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbplan/collision.hpp"
#include "wbplan/corridor.hpp"
#include "wbplan/error.hpp"

using namespace wbplan;

namespace {

PathResult straightPath(double length, double speed) {
  PathResult p;
  p.status = SearchStatus::kSuccess;
  const SearchState s{1.0, 2.0, 0.0, speed, 0.0};
  const MotionPrimitive prim{s, {}, length / speed};
  p.states = {s, prim.end()};
  p.primitives = {prim};
  return p;
}

std::vector<Eigen::Vector2d> polygonVertices(const CorridorSegment& seg) {
  return seg.polygon.vertices();
}

}  // namespace

TEST(ConstraintPoints, SinglePose) {
  PathResult p;
  p.status = SearchStatus::kSuccess;
  p.states = {SearchState{1, 1, 0.4, 0, 0}};
  const auto pts = sampleConstraintPoints(p, 0.3);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0].pose.psi, 0.4);
}

TEST(ConstraintPoints, Fencepost) {
  const auto pts = sampleConstraintPoints(straightPath(4.0, 1.0), 1.0);
  ASSERT_EQ(pts.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(pts[k].pose.x, 1.0 + k, 1e-9);
    EXPECT_NEAR(pts[k].time, k, 1e-9);
  }
}

TEST(ConstraintPoints, SpacingBound) {
  PathResult p;
  p.status = SearchStatus::kSuccess;
  SearchState s{0, 0, 0, 0.5, 0};
  p.states = {s};
  for (const ControlInput u : {ControlInput{1, 0.5, 0.3}, ControlInput{-0.5, 1, -0.2},
                               ControlInput{0, -1, 0.1}}) {
    const MotionPrimitive prim{p.states.back(), u, 0.5};
    p.primitives.push_back(prim);
    p.states.push_back(prim.end());
  }
  const double spacing = 0.2;
  const auto pts = sampleConstraintPoints(p, spacing);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    EXPECT_LE((pts[k].pose.position() - pts[k - 1].pose.position()).norm(), spacing + 1e-6);
    EXPECT_GT(pts[k].time, pts[k - 1].time);
  }
  EXPECT_NEAR(pts.back().time, p.duration(), 1e-12);
  EXPECT_THROW(sampleConstraintPoints(p, 0.0), Error);
}

TEST(ExpandObb, EmptyMapSaturates) {
  const OccupancyGrid g = OccupancyGrid::uniform(100, 100, 0.1);
  const RobotShape shape{0.5, 0.2, 5};
  const CorridorSegment seg = expandObb(g, shape, Pose2{5, 5, 0.3}, 0.1, 2.0);
  for (double e : seg.expansion) EXPECT_NEAR(e, 2.0, 1e-12);
  EXPECT_EQ(seg.polygon.faceCount(), 4u);
}

TEST(ExpandObb, FlushWall) {
  OccupancyGrid g = OccupancyGrid::uniform(100, 60, 0.1);
  g.fillBox({0, 2.1}, {10, 6});
  const RobotShape shape{0.5, 0.2, 5};
  const Pose2 anchor{5, 1.995, 0};  // top face at y = 2.095
  const CorridorSegment seg = expandObb(g, shape, anchor, 0.1, 1.0);
  EXPECT_EQ(seg.expansion[1], 0.0);
  EXPECT_GT(seg.expansion[0], 0.0);
  EXPECT_GT(seg.expansion[2], 0.0);
  EXPECT_GT(seg.expansion[3], 0.0);
  EXPECT_FALSE(oracle::polygonHitsObstacle(g, polygonVertices(seg)));
  // One more step on the +y face would reach the wall.
  const auto grown = oracle::boxCorners(shape.length, shape.width + 0.1, 5, 1.995 + 0.05, 0);
  EXPECT_TRUE(oracle::polygonHitsObstacle(g, grown));
}

TEST(ExpandObb, ContainsAnchorBody) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(1.0, 5.0), ang(-3, 3);
  const RobotShape shape{0.6, 0.25, 6};
  for (int k = 0; k < 30; ++k) {
    const OccupancyGrid g = oracle::randomGrid(rng, 60, 60, 0.1, 0.01);
    const Pose2 anchor{pos(rng), pos(rng), ang(rng)};
    if (poseInCollision(g, shape, anchor)) {
      EXPECT_THROW(expandObb(g, shape, anchor, 0.1, 2.0), Error);
      continue;
    }
    const CorridorSegment seg = expandObb(g, shape, anchor, 0.1, 2.0);
    for (const auto& q : edgeSamplePoints(shape, anchor)) EXPECT_TRUE(seg.polygon.contains(q));
    for (const auto& q : obbVertices(shape, anchor)) EXPECT_TRUE(seg.polygon.contains(q));
    EXPECT_FALSE(oracle::polygonHitsObstacle(g, polygonVertices(seg)));
    // Faces stay parallel to the body axes.
    const Eigen::Matrix2d R = rotation(anchor.psi);
    EXPECT_NEAR(seg.polygon.normals()[0].dot(R.col(0)), 1.0, 1e-12);
    EXPECT_NEAR(seg.polygon.normals()[1].dot(R.col(1)), 1.0, 1e-12);
  }
}

TEST(ExpandObb, InvalidAnchor) {
  OccupancyGrid g = OccupancyGrid::uniform(50, 50, 0.1);
  g.fillBox({2.0, 2.0}, {2.2, 2.2});
  try {
    expandObb(g, RobotShape{0.5, 0.2, 5}, Pose2{2.1, 2.1, 0}, 0.1, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidAnchor);
  }
}

TEST(ExpandObb, MonotoneInCapAgainstWalls) {
  OccupancyGrid g = OccupancyGrid::uniform(100, 60, 0.1);
  g.fillBox({0, 3.0}, {10, 6});
  g.fillBox({6.5, 0}, {10, 6});
  const RobotShape shape{0.5, 0.2, 5};
  std::array<double, 4> last{};
  for (double cap : {0.0, 0.3, 0.7, 1.2, 2.0, 3.0}) {
    const CorridorSegment seg = expandObb(g, shape, Pose2{5, 2, 0}, 0.1, cap);
    for (int k = 0; k < 4; ++k) {
      EXPECT_GE(seg.expansion[k], last[k] - 1e-12);
      EXPECT_LE(seg.expansion[k], cap + 1e-12);
    }
    last = seg.expansion;
  }
}

TEST(BuildCorridor, OneSegmentPerPoint) {
  const OccupancyGrid g = OccupancyGrid::uniform(100, 50, 0.1);
  const RobotShape shape{0.5, 0.2, 5};
  CorridorParams params;
  params.spacing = 0.5;
  const PathResult path = straightPath(4.0, 1.0);
  const auto corridor = buildCorridor(g, shape, path, params);
  EXPECT_EQ(corridor.size(), sampleConstraintPoints(path, 0.5).size());

  PathResult single;
  single.status = SearchStatus::kSuccess;
  single.states = {SearchState{5, 2.5, 0, 0, 0}};
  EXPECT_EQ(buildCorridor(g, shape, single, params).size(), 1u);

  std::ostringstream out;
  writeCorridor(out, corridor);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double v;
    int count = 0;
    while (ls >> v) ++count;
    EXPECT_EQ(count, 8);
    ++lines;
  }
  EXPECT_EQ(lines, static_cast<int>(corridor.size()));
}

TEST(BuildCorridor, PolygonsFreeAlongSearchedPath) {
  OccupancyGrid g = OccupancyGrid::uniform(100, 60, 0.1);
  g.fillBox({4.0, 0}, {4.4, 3.5});
  const RobotShape shape{0.5, 0.2, 5};
  const PathResult path = search(g, shape, SearchLimits{}, {2, 2, 0, 0, 0}, {7, 2, 0, 0, 0});
  ASSERT_TRUE(path.ok());
  const auto corridor = buildCorridor(g, shape, path, CorridorParams{});
  ASSERT_GE(corridor.size(), 2u);
  for (const auto& seg : corridor) {
    EXPECT_FALSE(oracle::polygonHitsObstacle(g, polygonVertices(seg)));
  }
}
