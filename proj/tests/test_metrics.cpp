#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbplan/error.hpp"
#include "wbplan/metrics.hpp"

using namespace wbplan;

TEST(DispersedJerk, ZeroTrajectory) {
  const auto traj = MincoTrajectory::construct(BoundaryState::Zero(), BoundaryState::Zero(),
                                               Eigen::Matrix3Xd(3, 0), Eigen::VectorXd::Ones(1));
  EXPECT_EQ(dispersedJerk(traj, 0.01), 0.0);
}

TEST(DispersedJerk, CubicHasEnergy36) {
  // x(t) = t^3 on [0, 1]: x(1) = 1, x'(1) = 3, x''(1) = 6 with rest start.
  BoundaryState tail = BoundaryState::Zero();
  tail.row(0) << 1.0, 3.0, 6.0;
  const auto traj = MincoTrajectory::construct(BoundaryState::Zero(), tail,
                                               Eigen::Matrix3Xd(3, 0), Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(traj.coefficients()(3, 0), 1.0, 1e-12);
  EXPECT_NEAR(dispersedJerk(traj, 1e-4), 36.0, 36.0 * 1e-3);
  EXPECT_THROW(dispersedJerk(traj, 0.0), Error);
}

TEST(DispersedJerk, ConvergesToIntegral) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-2, 2), t(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 5;
    const BoundaryState head = BoundaryState::NullaryExpr([&] { return u(rng); });
    const BoundaryState tail = BoundaryState::NullaryExpr([&] { return u(rng); });
    const Eigen::Matrix3Xd q = Eigen::Matrix3Xd::NullaryExpr(3, m - 1, [&] { return u(rng); });
    const Eigen::VectorXd T = Eigen::VectorXd::NullaryExpr(m, [&] { return t(rng); });
    const auto traj = MincoTrajectory::construct(head, tail, q, T);
    double exact = 0;
    for (int i = 0; i < m; ++i) {
      for (int ch = 0; ch < 3; ++ch) {
        const Eigen::Matrix<double, 6, 1> c = traj.coefficients().block<6, 1>(6 * i, ch);
        exact += oracle::gaussLegendre(
            [&](double s) {
              const double j = oracle::polyJerk(c, s);
              return j * j;
            },
            0, T[i], 4);
      }
    }
    EXPECT_NEAR(dispersedJerk(traj, 1e-3), exact, 0.01 * exact);
  }
}

TEST(Stats, StraightLine) {
  BoundaryState head = BoundaryState::Zero(), tail = BoundaryState::Zero();
  head(0, 1) = tail(0, 1) = 0.5;
  tail(0, 0) = 1.0;
  const auto traj = MincoTrajectory::construct(head, tail, Eigen::Matrix3Xd(3, 0),
                                               Eigen::VectorXd::Ones(1) * 2);
  const TrajectoryStats s = trajectoryStats(traj, 0.01);
  EXPECT_NEAR(s.duration, 2.0, 1e-12);
  EXPECT_NEAR(s.length, 1.0, 1e-9);
  EXPECT_NEAR(s.max_speed, 0.5, 1e-9);
  EXPECT_NEAR(s.max_accel, 0.0, 1e-9);
  EXPECT_NEAR(s.max_yaw_rate, 0.0, 1e-12);
}

TEST(TrajectoryCsv, RoundTripAndValidation) {
  BoundaryState head = BoundaryState::Zero(), tail = BoundaryState::Zero();
  head.col(0) << 1.0, 1.0, 0.0;
  tail.col(0) << 3.0, 1.0, 0.0;
  const auto traj = MincoTrajectory::construct(head, tail, Eigen::Matrix3Xd(3, 0),
                                               Eigen::VectorXd::Ones(1) * 3);
  std::stringstream ss;
  writeTrajectoryCsv(ss, traj, 0.01);
  const auto samples = readTrajectoryCsv(ss);
  ASSERT_EQ(samples.size(), 301u);
  EXPECT_NEAR(samples[150].x, traj.eval(1.5, 0).x(), 1e-12);
  EXPECT_NEAR(samples[150].vx, traj.eval(1.5, 1).x(), 1e-12);

  OccupancyGrid g = OccupancyGrid::uniform(40, 20, 0.1);
  const RobotShape shape{0.5, 0.2, 5};
  EXPECT_TRUE(validateSamples(g, shape, samples).collision_free);
  g.fillBox({2.0, 0.0}, {2.1, 1.0});
  const ValidationResult bad = validateSamples(g, shape, samples);
  EXPECT_FALSE(bad.collision_free);
  ASSERT_TRUE(bad.first_collision_time.has_value());
  EXPECT_GT(*bad.first_collision_time, 0.0);
}

TEST(TrajectoryCsv, Malformed) {
  std::istringstream wrong_header("a,b\n1,2\n");
  EXPECT_THROW(readTrajectoryCsv(wrong_header), ParseError);
  std::istringstream short_row("t,x,y,psi,vx,vy,omega,ax,ay\n0,1,2\n");
  try {
    readTrajectoryCsv(short_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}
