#include <gtest/gtest.h>

#include "wbplan/lbfgs.hpp"

using namespace wbplan;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  double f = 0;
  g.setZero(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i], b = 1 - x[i];
    f += 100 * a * a + b * b;
    g[i] += -400 * a * x[i] - 2 * b;
    g[i + 1] += 200 * a;
  }
  return f;
}

}  // namespace

TEST(Lbfgs, Rosenbrock) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(10, -1.2);
  const LbfgsResult r = minimizeLbfgs(rosenbrock, x);
  EXPECT_EQ(r.status, LbfgsStatus::kConverged);
  EXPECT_LT((x - Eigen::VectorXd::Ones(10)).norm(), 1e-4);
}

TEST(Lbfgs, QuadraticAndMonotone) {
  Eigen::VectorXd d(6);
  d << 1, 3, 10, 30, 100, 300;
  auto quad = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = d.cwiseProduct(x);
    return 0.5 * x.dot(g);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Ones(6);
  double last = 1e300;
  bool monotone = true;
  const LbfgsResult r = minimizeLbfgs(quad, x, {}, [&](int, const Eigen::VectorXd&, double f,
                                                      const Eigen::VectorXd&) {
    monotone = monotone && f <= last;
    last = f;
    return true;
  });
  EXPECT_EQ(r.status, LbfgsStatus::kConverged);
  EXPECT_TRUE(monotone);
  EXPECT_LT(x.norm(), 1e-5);
}

TEST(Lbfgs, StopRequest) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, -1.2);
  const LbfgsResult r = minimizeLbfgs(
      rosenbrock, x, {},
      [](int iter, const Eigen::VectorXd&, double, const Eigen::VectorXd&) { return iter < 3; });
  EXPECT_EQ(r.status, LbfgsStatus::kStopped);
  EXPECT_EQ(r.iterations, 3);
}

TEST(Lbfgs, IterationCap) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(10, -1.2);
  LbfgsParams p;
  p.max_iterations = 5;
  EXPECT_EQ(minimizeLbfgs(rosenbrock, x, p).status, LbfgsStatus::kMaxIterations);
}

TEST(Lbfgs, WrongGradientBreaksLineSearch) {
  auto bad = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = -x;  // points uphill
    return 0.5 * x.squaredNorm();
  };
  Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
  const Eigen::VectorXd start = x;
  const LbfgsResult r = minimizeLbfgs(bad, x);
  EXPECT_EQ(r.status, LbfgsStatus::kLineSearchFailed);
  EXPECT_LE(x.squaredNorm(), start.squaredNorm());
}
