#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "wbplan/geometry.hpp"
#include "wbplan/minco.hpp"

namespace wbplan {

struct DynamicLimits {
  double v_max = 1.0;  // m/s, on |(vx, vy)|
  double a_max = 2.0;  // m/s^2, on |(ax, ay)|
  double w_max = 1.0;  // rad/s, on |psi_dot|
};

struct PenaltyWeights {
  double rho = 1.0;
  double w_v = 1e4;
  double w_a = 1e4;
  double w_w = 1e4;
  double w_p = 1e5;
  double delta_t = 0.05;  // checkpoint spacing used to size each segment's grid
  double mu = 1e-2;       // smoothing width of the relaxed L1

  void validate() const;
};

/// C2 relaxation of max(x, 0): zero below 0, cubic on (0, mu), x - mu/2 above.
struct Relaxed {
  double value;
  double slope;
};
Relaxed smoothedL1(double x, double mu) noexcept;

/// Value with partials w.r.t. the coefficients and the explicit segment times.
struct CostGradient {
  double value = 0.0;
  CoefficientMatrix dc;
  Eigen::VectorXd dT;

  static CostGradient zeros(int segments);
  CostGradient& operator+=(const CostGradient& o);
};

/// Closed-form jerk energy over all three channels plus rho * sum(T).
CostGradient smoothnessCost(const MincoTrajectory& traj, double rho);

/// Checkpoints per segment for a given spacing: max(2, ceil(T_i / delta_t)).
std::vector<int> checkpointResolution(const Eigen::VectorXd& times, double delta_t);

struct FeasibilityBreakdown {
  double velocity = 0.0;
  double acceleration = 0.0;
  double yaw_rate = 0.0;
};

/// Speed, acceleration and yaw-rate violations at trapezoid-weighted
/// checkpoints t_j = j T_i / K_i, j = 0..K_i.
CostGradient feasibilityPenalty(const MincoTrajectory& traj, const DynamicLimits& limits,
                                const PenaltyWeights& weights, std::span<const int> resolution,
                                FeasibilityBreakdown* breakdown = nullptr);

/// Corridor violation of the robot edge samples. Piece i is checked against
/// polygons[i] and polygons[i + 1] and charged the smaller of the two
/// penalties at every checkpoint. Needs segmentCount() + 1 polygons; throws
/// Error(kConfiguration) otherwise.
CostGradient wholebodyPenalty(const MincoTrajectory& traj, std::span<const ConvexPolygon> polygons,
                              const RobotShape& shape, const PenaltyWeights& weights,
                              std::span<const int> resolution);

}  // namespace wbplan
