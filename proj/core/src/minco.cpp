#include "wbplan/minco.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <string>

#include "wbplan/error.hpp"

namespace wbplan {

BandedSystem::BandedSystem(int n, int lower, int upper)
    : n_(n), lower_(lower), upper_(upper),
      data_(static_cast<std::size_t>(n) * (lower + upper + 1), 0.0) {}

void BandedSystem::setZero() { std::fill(data_.begin(), data_.end(), 0.0); }

void BandedSystem::factorizeLU() {
  for (int k = 0; k < n_; ++k) {
    const double pivot = (*this)(k, k);
    if (std::abs(pivot) < kPivotTolerance) {
      throw Error(ErrorCode::kSingularSystem,
                  "banded system is singular at pivot " + std::to_string(k));
    }
    const int i_max = std::min(k + lower_, n_ - 1);
    const int j_max = std::min(k + upper_, n_ - 1);
    for (int i = k + 1; i <= i_max; ++i) {
      if ((*this)(i, k) != 0.0) (*this)(i, k) /= pivot;
    }
    for (int j = k + 1; j <= j_max; ++j) {
      const double ukj = (*this)(k, j);
      if (ukj == 0.0) continue;
      for (int i = k + 1; i <= i_max; ++i) {
        const double lik = (*this)(i, k);
        if (lik != 0.0) (*this)(i, j) -= lik * ukj;
      }
    }
  }
}

void BandedSystem::solve(Eigen::Ref<Eigen::MatrixXd> b) const {
  for (int j = 0; j < n_; ++j) {
    const int i_max = std::min(j + lower_, n_ - 1);
    for (int i = j + 1; i <= i_max; ++i) {
      const double l = (*this)(i, j);
      if (l != 0.0) b.row(i) -= l * b.row(j);
    }
  }
  for (int j = n_ - 1; j >= 0; --j) {
    b.row(j) /= (*this)(j, j);
    const int i_min = std::max(0, j - upper_);
    for (int i = i_min; i < j; ++i) {
      const double u = (*this)(i, j);
      if (u != 0.0) b.row(i) -= u * b.row(j);
    }
  }
}

void BandedSystem::solveAdjoint(Eigen::Ref<Eigen::MatrixXd> b) const {
  // A^T = U^T L^T: forward through U^T, then back through the unit L^T.
  for (int j = 0; j < n_; ++j) {
    b.row(j) /= (*this)(j, j);
    const int i_max = std::min(j + upper_, n_ - 1);
    for (int i = j + 1; i <= i_max; ++i) {
      const double u = (*this)(j, i);
      if (u != 0.0) b.row(i) -= u * b.row(j);
    }
  }
  for (int j = n_ - 1; j >= 0; --j) {
    const int i_min = std::max(0, j - lower_);
    for (int i = i_min; i < j; ++i) {
      const double l = (*this)(j, i);
      if (l != 0.0) b.row(i) -= l * b.row(j);
    }
  }
}

Eigen::Matrix<double, 1, kMincoCoeffs> quinticBasis(double t, int order) {
  Eigen::Matrix<double, 1, kMincoCoeffs> row = Eigen::Matrix<double, 1, kMincoCoeffs>::Zero();
  for (int k = order; k < kMincoCoeffs; ++k) {
    double factor = 1.0;
    for (int m = 0; m < order; ++m) factor *= (k - m);
    row(k) = factor * std::pow(t, k - order);
  }
  return row;
}

MincoTrajectory MincoTrajectory::construct(const BoundaryState& head, const BoundaryState& tail,
                                           const Eigen::Matrix3Xd& waypoints,
                                           const Eigen::VectorXd& times) {
  const int m = static_cast<int>(times.size());
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "trajectory needs at least one segment");
  if (waypoints.cols() != m - 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(m - 1) + " waypoints, got " +
                    std::to_string(waypoints.cols()));
  }
  for (int i = 0; i < m; ++i) {
    if (!(times(i) > 0.0) || !std::isfinite(times(i))) {
      throw Error(ErrorCode::kInvalidTime,
                  "segment " + std::to_string(i) + " has non-positive duration");
    }
  }

  MincoTrajectory traj;
  traj.head_ = head;
  traj.tail_ = tail;
  traj.waypoints_ = waypoints;
  traj.times_ = times;

  const int n = kMincoCoeffs * m;
  BandedSystem a(n, 6, 6);
  CoefficientMatrix b = CoefficientMatrix::Zero(n, kMincoChannels);

  // Start: position, velocity, acceleration of segment 0 at t = 0.
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  a(2, 2) = 2.0;
  b.row(0) = head.col(0).transpose();
  b.row(1) = head.col(1).transpose();
  b.row(2) = head.col(2).transpose();

  for (int i = 0; i < m - 1; ++i) {
    const double t1 = times(i), t2 = t1 * t1, t3 = t2 * t1, t4 = t2 * t2, t5 = t4 * t1;
    const int r = 6 * i;
    // Jerk and snap continuity.
    a(r + 3, r + 3) = 6.0;
    a(r + 3, r + 4) = 24.0 * t1;
    a(r + 3, r + 5) = 60.0 * t2;
    a(r + 3, r + 9) = -6.0;
    a(r + 4, r + 4) = 24.0;
    a(r + 4, r + 5) = 120.0 * t1;
    a(r + 4, r + 10) = -24.0;
    // Waypoint interpolation.
    a(r + 5, r + 0) = 1.0;
    a(r + 5, r + 1) = t1;
    a(r + 5, r + 2) = t2;
    a(r + 5, r + 3) = t3;
    a(r + 5, r + 4) = t4;
    a(r + 5, r + 5) = t5;
    b.row(r + 5) = waypoints.col(i).transpose();
    // Position, velocity, acceleration continuity.
    a(r + 6, r + 0) = 1.0;
    a(r + 6, r + 1) = t1;
    a(r + 6, r + 2) = t2;
    a(r + 6, r + 3) = t3;
    a(r + 6, r + 4) = t4;
    a(r + 6, r + 5) = t5;
    a(r + 6, r + 6) = -1.0;
    a(r + 7, r + 1) = 1.0;
    a(r + 7, r + 2) = 2.0 * t1;
    a(r + 7, r + 3) = 3.0 * t2;
    a(r + 7, r + 4) = 4.0 * t3;
    a(r + 7, r + 5) = 5.0 * t4;
    a(r + 7, r + 7) = -1.0;
    a(r + 8, r + 2) = 2.0;
    a(r + 8, r + 3) = 6.0 * t1;
    a(r + 8, r + 4) = 12.0 * t2;
    a(r + 8, r + 5) = 20.0 * t3;
    a(r + 8, r + 8) = -2.0;
  }

  {
    const double t1 = times(m - 1), t2 = t1 * t1, t3 = t2 * t1, t4 = t2 * t2, t5 = t4 * t1;
    const int r = 6 * (m - 1);
    a(r + 3, r + 0) = 1.0;
    a(r + 3, r + 1) = t1;
    a(r + 3, r + 2) = t2;
    a(r + 3, r + 3) = t3;
    a(r + 3, r + 4) = t4;
    a(r + 3, r + 5) = t5;
    a(r + 4, r + 1) = 1.0;
    a(r + 4, r + 2) = 2.0 * t1;
    a(r + 4, r + 3) = 3.0 * t2;
    a(r + 4, r + 4) = 4.0 * t3;
    a(r + 4, r + 5) = 5.0 * t4;
    a(r + 5, r + 2) = 2.0;
    a(r + 5, r + 3) = 6.0 * t1;
    a(r + 5, r + 4) = 12.0 * t2;
    a(r + 5, r + 5) = 20.0 * t3;
    b.row(r + 3) = tail.col(0).transpose();
    b.row(r + 4) = tail.col(1).transpose();
    b.row(r + 5) = tail.col(2).transpose();
  }

  a.factorizeLU();
  a.solve(b);
  if (!b.allFinite()) throw Error(ErrorCode::kSingularSystem, "non-finite spline coefficients");
  traj.coeffs_ = std::move(b);
  traj.lu_ = std::move(a);
  return traj;
}

std::pair<int, double> MincoTrajectory::locate(double t) const {
  const int m = segmentCount();
  int i = 0;
  t = std::max(t, 0.0);
  while (i < m - 1 && t > times_(i)) {
    t -= times_(i);
    ++i;
  }
  return {i, std::min(t, times_(i))};
}

Eigen::Vector3d MincoTrajectory::evalSegment(int i, double t, int order) const {
  return (quinticBasis(t, order) * coeffs_.middleRows<kMincoCoeffs>(kMincoCoeffs * i)).transpose();
}

Eigen::Vector3d MincoTrajectory::eval(double t, int order) const {
  if (order < 0 || order > 5) {
    throw Error(ErrorCode::kDomain, "derivative order must be within 0..5");
  }
  const double total = totalDuration();
  const double slack = 1e-12 * std::max(1.0, total);
  if (segmentCount() == 0 || t < -slack || t > total + slack || !std::isfinite(t)) {
    throw Error(ErrorCode::kDomain, "time " + std::to_string(t) + " outside trajectory");
  }
  const auto [i, local] = locate(t);
  return evalSegment(i, local, order);
}

MincoTrajectory::Gradient MincoTrajectory::propagateGradient(
    const CoefficientMatrix& dJ_dc, const Eigen::VectorXd& dJ_dT) const {
  const int m = segmentCount();
  if (dJ_dc.rows() != kMincoCoeffs * m || dJ_dT.size() != m) {
    throw Error(ErrorCode::kInvalidArgument, "gradient dimensions do not match trajectory");
  }
  Eigen::MatrixXd adj = dJ_dc;
  lu_.solveAdjoint(adj);

  Gradient g;
  g.waypoints.resize(3, m - 1);
  for (int i = 0; i < m - 1; ++i) g.waypoints.col(i) = adj.row(6 * i + 5).transpose();

  // Each row of A that involves T_i evaluates some derivative of segment i at
  // T_i, so its T-derivative times c is the next derivative there.
  g.times = dJ_dT;
  for (int i = 0; i < m; ++i) {
    const double ti = times_(i);
    const int r = 6 * i;
    double acc = 0.0;
    auto row_term = [&](int row, int order) {
      acc += adj.row(row).dot(evalSegment(i, ti, order).transpose());
    };
    if (i < m - 1) {
      row_term(r + 3, 4);
      row_term(r + 4, 5);
      row_term(r + 5, 1);
      row_term(r + 6, 1);
      row_term(r + 7, 2);
      row_term(r + 8, 3);
    } else {
      row_term(r + 3, 1);
      row_term(r + 4, 2);
      row_term(r + 5, 3);
    }
    g.times(i) -= acc;
  }
  if (!g.waypoints.allFinite() || !g.times.allFinite()) {
    throw Error(ErrorCode::kSingularSystem, "gradient propagation produced non-finite values");
  }
  return g;
}

void writeTrajectoryCsv(std::ostream& out, const MincoTrajectory& traj, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sample period must be positive");
  out << "t,x,y,psi,vx,vy,omega,ax,ay\n";
  out << std::setprecision(17);
  const double total = traj.totalDuration();
  const auto n = static_cast<long>(std::floor(total / dt + 1e-9));
  auto row = [&](double t) {
    const Eigen::Vector3d p = traj.eval(t, 0), v = traj.eval(t, 1), a = traj.eval(t, 2);
    out << t << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << v.x() << ',' << v.y()
        << ',' << v.z() << ',' << a.x() << ',' << a.y() << '\n';
  };
  for (long k = 0; k <= n; ++k) row(std::min(k * dt, total));
  if (total - n * dt > 1e-9) row(total);
}

}  // namespace wbplan
