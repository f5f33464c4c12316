#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbplan/banded.hpp"
#include "wbplan/error.hpp"
#include "wbplan/minco.hpp"

using namespace wbplan;

namespace {

struct Instance {
  BoundaryState head, tail;
  Eigen::Matrix3Xd q;
  Eigen::VectorXd T;
};

Instance randomInstance(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(-2, 2), t(0.3, 2.0);
  Instance in;
  in.head = BoundaryState::NullaryExpr([&] { return u(rng); });
  in.tail = BoundaryState::NullaryExpr([&] { return u(rng); });
  in.q = Eigen::Matrix3Xd::NullaryExpr(3, m - 1, [&] { return u(rng); });
  in.T = Eigen::VectorXd::NullaryExpr(m, [&] { return t(rng); });
  return in;
}

MincoTrajectory build(const Instance& in) {
  return MincoTrajectory::construct(in.head, in.tail, in.q, in.T);
}

double jerkIntegral(const MincoTrajectory& traj, int channel) {
  double sum = 0;
  for (int i = 0; i < traj.segmentCount(); ++i) {
    const Eigen::Matrix<double, 6, 1> c = traj.coefficients().block<6, 1>(6 * i, channel);
    sum += oracle::gaussLegendre(
        [&](double t) {
          const double j = oracle::polyJerk(c, t);
          return j * j;
        },
        0.0, traj.times()[i], 4);
  }
  return sum;
}

}  // namespace

TEST(Banded, MatchesDenseSolve) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 30, lo = 4, hi = 3;
  BandedSystem band(n, lo, hi);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - lo); j <= std::min(n - 1, i + hi); ++j) {
      const double v = u(rng) + (i == j ? 8.0 : 0.0);
      band(i, j) = v;
      dense(i, j) = v;
    }
  }
  const Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(n, 3, [&] { return u(rng); });
  band.factorizeLU();
  Eigen::MatrixXd x = b, y = b;
  band.solve(x);
  band.solveAdjoint(y);
  EXPECT_LT((dense * x - b).norm(), 1e-10);
  EXPECT_LT((dense.transpose() * y - b).norm(), 1e-10);
}

TEST(Banded, SingularPivot) {
  BandedSystem band(3, 1, 1);
  band(0, 0) = 0.0;
  band(1, 1) = band(2, 2) = 1.0;
  EXPECT_THROW(band.factorizeLU(), Error);
}

TEST(Minco, RestToRestQuintic) {
  BoundaryState head = BoundaryState::Zero(), tail = BoundaryState::Zero();
  tail(0, 0) = 1.0;
  const auto traj = MincoTrajectory::construct(head, tail, Eigen::Matrix3Xd(3, 0),
                                               Eigen::VectorXd::Ones(1));
  const double expected[6] = {0, 0, 0, 10, -15, 6};
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(traj.coefficients()(k, 0), expected[k], 1e-9);
    EXPECT_NEAR(traj.coefficients()(k, 1), 0.0, 1e-12);
    EXPECT_NEAR(traj.coefficients()(k, 2), 0.0, 1e-12);
  }
  EXPECT_NEAR(jerkIntegral(traj, 0), 720.0, 1e-9);
}

TEST(Minco, ZeroBoundaryIsZero) {
  const auto traj = MincoTrajectory::construct(BoundaryState::Zero(), BoundaryState::Zero(),
                                               Eigen::Matrix3Xd(3, 0), Eigen::VectorXd::Ones(1) * 2);
  EXPECT_LT(traj.coefficients().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Minco, BoundaryJunctionsAndWaypoints) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + trial % 8;
    const Instance in = randomInstance(rng, m);
    const auto traj = build(in);
    for (int d = 0; d < 3; ++d) {
      EXPECT_LT((traj.eval(0.0, d) - in.head.col(d)).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((traj.evalSegment(m - 1, in.T[m - 1], d) - in.tail.col(d)).cwiseAbs().maxCoeff(),
                1e-9);
    }
    for (int i = 0; i + 1 < m; ++i) {
      EXPECT_LT((traj.evalSegment(i, in.T[i], 0) - in.q.col(i)).cwiseAbs().maxCoeff(), 1e-9);
      for (int d = 0; d <= 4; ++d) {
        const Eigen::Vector3d left = traj.evalSegment(i, in.T[i], d);
        const Eigen::Vector3d right = traj.evalSegment(i + 1, 0.0, d);
        EXPECT_LT((left - right).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, left.norm()))
            << "order " << d;
      }
    }
  }
}

TEST(Minco, EvalDomain) {
  std::mt19937_64 rng(4);
  const auto traj = build(randomInstance(rng, 3));
  EXPECT_THROW(traj.eval(0.0, 6), Error);
  EXPECT_THROW(traj.eval(-0.1, 0), Error);
  EXPECT_THROW(traj.eval(traj.totalDuration() + 0.1, 0), Error);
  EXPECT_NO_THROW(traj.eval(traj.totalDuration(), 5));
  try {
    traj.eval(0.0, 6);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
}

TEST(Minco, ConstructErrors) {
  const BoundaryState z = BoundaryState::Zero();
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kParse;
  };
  EXPECT_EQ(code([&] {
              MincoTrajectory::construct(z, z, Eigen::Matrix3Xd(3, 0), Eigen::VectorXd::Zero(1));
            }),
            ErrorCode::kInvalidTime);
  EXPECT_EQ(code([&] {
              MincoTrajectory::construct(z, z, Eigen::Matrix3Xd(3, 2), Eigen::VectorXd::Ones(2));
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code([&] {
              MincoTrajectory::construct(z, z, Eigen::Matrix3Xd(3, 0), Eigen::VectorXd(0));
            }),
            ErrorCode::kInvalidArgument);
}

TEST(Minco, MinimalJerkAmongC2Interpolants) {
  // Perturb x-channel coefficients inside the null space of the C2
  // interpolation constraints; the jerk integral can only grow.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + trial % 4;
    const Instance in = randomInstance(rng, m);
    const auto traj = build(in);
    const int rows = 6 + 4 * (m - 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, 6 * m);
    int r = 0;
    for (int d = 0; d < 3; ++d) A.block(r++, 0, 1, 6) = quinticBasis(0.0, d);
    for (int d = 0; d < 3; ++d) A.block(r++, 6 * (m - 1), 1, 6) = quinticBasis(in.T[m - 1], d);
    for (int i = 0; i + 1 < m; ++i) {
      A.block(r++, 6 * i, 1, 6) = quinticBasis(in.T[i], 0);
      for (int d = 0; d < 3; ++d, ++r) {
        A.block(r, 6 * i, 1, 6) = quinticBasis(in.T[i], d);
        A.block(r, 6 * (i + 1), 1, 6) = -quinticBasis(0.0, d);
      }
    }
    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(A).kernel();
    ASSERT_EQ(kernel.cols(), 2 * m - 2);
    const double base = jerkIntegral(traj, 0);
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd w = Eigen::VectorXd::NullaryExpr(kernel.cols(), [&] { return n01(rng); });
      const Eigen::VectorXd dc = 1e-2 * kernel * w;
      double perturbed = 0;
      for (int i = 0; i < m; ++i) {
        Eigen::Matrix<double, 6, 1> c = traj.coefficients().block<6, 1>(6 * i, 0);
        c += dc.segment<6>(6 * i);
        perturbed += oracle::gaussLegendre(
            [&](double t) {
              const double j = oracle::polyJerk(c, t);
              return j * j;
            },
            0.0, in.T[i], 4);
      }
      EXPECT_GT(perturbed, base);
    }
  }
}

TEST(Minco, GradientPullThroughIdentity) {
  std::mt19937_64 rng(6);
  const int m = 4;
  const auto traj = build(randomInstance(rng, m));
  for (int k = 0; k + 1 < m; ++k) {
    for (int ch = 0; ch < 3; ++ch) {
      CoefficientMatrix dc = CoefficientMatrix::Zero(6 * m, 3);
      dc.block<6, 1>(6 * k, ch) = quinticBasis(traj.times()[k], 0).transpose();
      Eigen::VectorXd dT = Eigen::VectorXd::Zero(m);
      dT[k] = traj.evalSegment(k, traj.times()[k], 1)[ch];
      const auto g = traj.propagateGradient(dc, dT);
      for (int kk = 0; kk + 1 < m; ++kk) {
        for (int cc = 0; cc < 3; ++cc) {
          EXPECT_NEAR(g.waypoints(cc, kk), (kk == k && cc == ch) ? 1.0 : 0.0, 1e-9);
        }
      }
      EXPECT_LT(g.times.cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Minco, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 6;
    const Instance in = randomInstance(rng, m);
    const CoefficientMatrix W = CoefficientMatrix::NullaryExpr(6 * m, 3, [&] { return u(rng); });
    const CoefficientMatrix L = CoefficientMatrix::NullaryExpr(6 * m, 3, [&] { return u(rng); });
    auto J = [&](const MincoTrajectory& t) {
      const auto& c = t.coefficients();
      return 0.5 * (W.array() * c.array().square()).sum() + (L.array() * c.array()).sum();
    };
    const auto traj = build(in);
    const CoefficientMatrix dJdc = (W.array() * traj.coefficients().array() + L.array()).matrix();
    const auto g = traj.propagateGradient(dJdc, Eigen::VectorXd::Zero(m));

    const int nq = 3 * (m - 1);
    Eigen::VectorXd x(nq + m);
    x << Eigen::Map<const Eigen::VectorXd>(in.q.data(), nq), in.T;
    auto f = [&](const Eigen::VectorXd& v) {
      Instance p = in;
      p.q = Eigen::Map<const Eigen::Matrix3Xd>(v.data(), 3, m - 1);
      p.T = v.tail(m);
      return J(build(p));
    };
    Eigen::VectorXd analytic(nq + m);
    analytic << Eigen::Map<const Eigen::VectorXd>(g.waypoints.data(), nq), g.times;
    const Eigen::VectorXd fd = oracle::centralDifference(f, x, 1e-6);
    EXPECT_LT(oracle::relativeError(analytic, fd), 1e-5) << "trial " << trial;
  }
}

TEST(Minco, CsvExport) {
  std::mt19937_64 rng(7);
  const auto traj = build(randomInstance(rng, 2));
  std::ostringstream out;
  writeTrajectoryCsv(out, traj, 0.01);
  std::istringstream in(out.str());
  std::string line, last;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,y,psi,vx,vy,omega,ax,ay");
  int rows = 0;
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  EXPECT_NEAR(std::stod(last.substr(0, last.find(','))), traj.totalDuration(), 1e-12);
  EXPECT_GE(rows, static_cast<int>(traj.totalDuration() / 0.01));
}
