#pragma once

#include <ostream>
#include <utility>

#include <Eigen/Core>

#include "wbplan/banded.hpp"

namespace wbplan {

/// Channels are (x, y, psi). Columns of a boundary matrix hold position,
/// velocity and acceleration.
using BoundaryState = Eigen::Matrix3d;
/// Per-segment coefficients stacked vertically: row 6 i + k multiplies t^k on
/// segment i, one column per channel.
using CoefficientMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

inline constexpr int kMincoChannels = 3;
inline constexpr int kMincoCoeffs = 6;

/// Quintic minimum-jerk spline over M segments, parameterized by the M - 1
/// intermediate waypoints and the M segment durations. Coefficients come from
/// one banded solve; the factorization is kept for gradient propagation.
class MincoTrajectory {
 public:
  struct Gradient {
    Eigen::Matrix3Xd waypoints;  // dJ/dq, one column per waypoint
    Eigen::VectorXd times;       // dJ/dT, total derivative
  };

  MincoTrajectory() = default;

  /// Throws Error(kInvalidTime) on a non-positive duration,
  /// Error(kInvalidArgument) on mismatched sizes and Error(kSingularSystem)
  /// when the system cannot be factorized.
  static MincoTrajectory construct(const BoundaryState& head, const BoundaryState& tail,
                                   const Eigen::Matrix3Xd& waypoints,
                                   const Eigen::VectorXd& times);

  int segmentCount() const noexcept { return static_cast<int>(times_.size()); }
  const Eigen::VectorXd& times() const noexcept { return times_; }
  double totalDuration() const noexcept { return times_.sum(); }
  const CoefficientMatrix& coefficients() const noexcept { return coeffs_; }
  const BoundaryState& head() const noexcept { return head_; }
  const BoundaryState& tail() const noexcept { return tail_; }
  const Eigen::Matrix3Xd& waypoints() const noexcept { return waypoints_; }

  /// Derivative of the given order (0..5) at global time t in [0, total].
  /// Throws Error(kDomain) outside that range or for other orders.
  Eigen::Vector3d eval(double t, int order = 0) const;
  /// Same, on segment i at local time t in [0, T_i] (not range-checked).
  Eigen::Vector3d evalSegment(int i, double t, int order) const;
  /// Segment index and local time for a global time (clamped to the range).
  std::pair<int, double> locate(double t) const;

  /// Total derivative of a scalar J with respect to (waypoints, times), given
  /// its partials dJ/dc (same layout as coefficients()) and the explicit
  /// dJ/dT holding c fixed.
  Gradient propagateGradient(const CoefficientMatrix& dJ_dc, const Eigen::VectorXd& dJ_dT) const;

 private:
  BoundaryState head_ = BoundaryState::Zero();
  BoundaryState tail_ = BoundaryState::Zero();
  Eigen::Matrix3Xd waypoints_;
  Eigen::VectorXd times_;
  CoefficientMatrix coeffs_;
  BandedSystem lu_;
};

/// Row vector of d^order/dt^order [1, t, ..., t^5].
Eigen::Matrix<double, 1, kMincoCoeffs> quinticBasis(double t, int order);

/// CSV with header "t,x,y,psi,vx,vy,omega,ax,ay", sampled every dt seconds
/// from 0 and always including the final time.
void writeTrajectoryCsv(std::ostream& out, const MincoTrajectory& traj, double dt);

}  // namespace wbplan
