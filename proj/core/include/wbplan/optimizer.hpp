#pragma once

#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "wbplan/corridor.hpp"
#include "wbplan/gridmap.hpp"
#include "wbplan/lbfgs.hpp"
#include "wbplan/minco.hpp"
#include "wbplan/penalties.hpp"

namespace wbplan {

/// Shortest segment duration the time map can produce.
inline constexpr double kMinSegmentTime = 0.01;

/// Smooth bijection from unconstrained reals to durations above
/// kMinSegmentTime (shifted softplus).
double timeFromParam(double tau) noexcept;
double paramFromTime(double t) noexcept;
/// dT / dtau
double timeParamDerivative(double tau) noexcept;

struct OptimizerSettings {
  LbfgsParams lbfgs;
  int max_escalations = 3;      // w_p x10 re-solves after failed validation
  double min_seed_time = 0.1;   // floor on seeded segment durations
};

/// Trajectory optimization over (waypoints, times). The corridor has one
/// polygon per constraint point; the trajectory gets one segment between each
/// pair of consecutive constraint points.
struct OptimizationProblem {
  std::vector<ConvexPolygon> polygons;  // segmentCount() + 1 entries
  RobotShape shape;
  BoundaryState head = BoundaryState::Zero();
  BoundaryState tail = BoundaryState::Zero();
  DynamicLimits limits;
  PenaltyWeights weights;
  Eigen::Matrix3Xd initial_waypoints;
  Eigen::VectorXd initial_times;
  std::vector<int> resolution;           // checkpoints per segment
  const OccupancyGrid* grid = nullptr;   // for a posteriori validation
  OptimizerSettings settings;

  int segmentCount() const noexcept { return static_cast<int>(initial_times.size()); }
  int dimension() const noexcept { return 3 * (segmentCount() - 1) + segmentCount(); }

  /// Throws Error(kConfiguration / kInvalidTime) on inconsistent sizes or
  /// seed times at or below kMinSegmentTime.
  void validate() const;

  /// Seeds waypoints from the intermediate constraint anchors and times from
  /// the search-path timing (floored at settings.min_seed_time). A single
  /// constraint point yields one rest-to-rest segment against that polygon.
  static OptimizationProblem fromCorridor(const std::vector<CorridorSegment>& corridor,
                                          const RobotShape& shape, const BoundaryState& head,
                                          const BoundaryState& tail, const DynamicLimits& limits,
                                          const PenaltyWeights& weights,
                                          const OptimizerSettings& settings = {});
};

/// Decision vector layout: waypoints column-major (x, y, psi per waypoint),
/// followed by one unconstrained time parameter per segment.
Eigen::VectorXd packDecision(const Eigen::Matrix3Xd& waypoints, const Eigen::VectorXd& times);
void unpackDecision(const Eigen::VectorXd& x, int segments, Eigen::Matrix3Xd& waypoints,
                    Eigen::VectorXd& times);

struct ObjectiveBreakdown {
  double smoothness = 0.0;  // jerk energy + rho * sum(T)
  double velocity = 0.0;
  double acceleration = 0.0;
  double yaw_rate = 0.0;
  double wholebody = 0.0;

  double penalty() const { return velocity + acceleration + yaw_rate + wholebody; }
  double total() const { return smoothness + penalty(); }
};

/// Objective and gradient over the decision vector. Builds the MINCO
/// trajectory, sums smoothness and penalties, and back-propagates through the
/// coefficient map and the time parameterization.
double totalObjective(const OptimizationProblem& problem, const Eigen::VectorXd& x,
                      Eigen::VectorXd& grad, ObjectiveBreakdown* breakdown = nullptr);

struct IterationRecord {
  int round = 0;  // escalation round
  int iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  ObjectiveBreakdown parts;
};

enum class OptimizeStatus {
  kSuccess,
  kOptimizationFailed,
  kUnsafeTrajectory,
};

const char* toString(OptimizeStatus status) noexcept;

struct OptimizedTrajectory {
  OptimizeStatus status = OptimizeStatus::kOptimizationFailed;
  MincoTrajectory trajectory;  // best iterate, also on failure
  LbfgsStatus solver_status = LbfgsStatus::kMaxIterations;
  int iterations = 0;
  int escalations = 0;
  double wall_time = 0.0;  // seconds
  double final_w_p = 0.0;
  ObjectiveBreakdown final_parts;
  std::vector<IterationRecord> history;

  bool ok() const noexcept { return status == OptimizeStatus::kSuccess; }
};

/// True iff every pose sampled every `dt` seconds (plus the end) is free.
bool trajectoryCollisionFree(const OccupancyGrid& grid, const RobotShape& shape,
                             const MincoTrajectory& traj, double dt);

/// Runs L-BFGS, then validates the result on problem.grid (when set) at
/// delta_t / 2; on a collision, w_p is raised tenfold and the solve is resumed
/// from the current iterate, up to settings.max_escalations times.
OptimizedTrajectory optimize(const OptimizationProblem& problem);

/// Per-iteration CSV: round,iteration,objective,gradient_norm,smoothness,
/// velocity,acceleration,yaw_rate,wholebody
void writeDiagnosticsCsv(std::ostream& out, const std::vector<IterationRecord>& history);

}  // namespace wbplan
