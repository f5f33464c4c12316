#include "wbplan/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <string>

#include "wbplan/collision.hpp"
#include "wbplan/error.hpp"

namespace wbplan {

double timeFromParam(double tau) noexcept {
  return kMinSegmentTime +
         (tau > 0.0 ? tau + std::log1p(std::exp(-tau)) : std::log1p(std::exp(tau)));
}

double paramFromTime(double t) noexcept {
  t -= kMinSegmentTime;
  return t > 30.0 ? t + std::log1p(-std::exp(-t)) : std::log(std::expm1(t));
}

double timeParamDerivative(double tau) noexcept {
  if (tau >= 0.0) return 1.0 / (1.0 + std::exp(-tau));
  const double e = std::exp(tau);
  return e / (1.0 + e);
}

void OptimizationProblem::validate() const {
  const int m = segmentCount();
  if (m < 1) throw Error(ErrorCode::kConfiguration, "problem has no segments");
  if (initial_waypoints.cols() != m - 1) {
    throw Error(ErrorCode::kConfiguration, "waypoint count must be segment count - 1");
  }
  if (static_cast<int>(polygons.size()) != m + 1) {
    throw Error(ErrorCode::kConfiguration, "need one corridor polygon per constraint point");
  }
  if (static_cast<int>(resolution.size()) != m) {
    throw Error(ErrorCode::kConfiguration, "need a checkpoint resolution per segment");
  }
  for (int i = 0; i < m; ++i) {
    if (!(initial_times(i) > kMinSegmentTime)) {
      throw Error(ErrorCode::kInvalidTime, "initial segment times must exceed kMinSegmentTime");
    }
  }
  shape.validate();
  weights.validate();
  if (!(limits.v_max > 0.0 && limits.a_max > 0.0 && limits.w_max > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "dynamic limits must be positive");
  }
}

OptimizationProblem OptimizationProblem::fromCorridor(
    const std::vector<CorridorSegment>& corridor, const RobotShape& shape,
    const BoundaryState& head, const BoundaryState& tail, const DynamicLimits& limits,
    const PenaltyWeights& weights, const OptimizerSettings& settings) {
  if (corridor.empty()) throw Error(ErrorCode::kConfiguration, "corridor is empty");
  OptimizationProblem prob;
  prob.shape = shape;
  prob.head = head;
  prob.tail = tail;
  prob.limits = limits;
  prob.weights = weights;
  prob.settings = settings;

  if (corridor.size() == 1) {
    prob.polygons = {corridor[0].polygon, corridor[0].polygon};
    prob.initial_waypoints.resize(3, 0);
    prob.initial_times = Eigen::VectorXd::Constant(1, std::max(settings.min_seed_time, 0.5));
  } else {
    const int m = static_cast<int>(corridor.size()) - 1;
    for (const auto& seg : corridor) prob.polygons.push_back(seg.polygon);
    prob.initial_waypoints.resize(3, m - 1);
    for (int i = 1; i < m; ++i) {
      const Pose2& a = corridor[static_cast<std::size_t>(i)].anchor;
      prob.initial_waypoints.col(i - 1) << a.x, a.y, a.psi;
    }
    prob.initial_times.resize(m);
    for (int i = 0; i < m; ++i) {
      const double dt = corridor[static_cast<std::size_t>(i + 1)].time -
                        corridor[static_cast<std::size_t>(i)].time;
      prob.initial_times(i) = std::max(settings.min_seed_time, dt);
    }
  }
  prob.resolution = checkpointResolution(prob.initial_times, weights.delta_t);
  return prob;
}

Eigen::VectorXd packDecision(const Eigen::Matrix3Xd& waypoints, const Eigen::VectorXd& times) {
  const Eigen::Index nq = waypoints.size();
  Eigen::VectorXd x(nq + times.size());
  x.head(nq) = Eigen::Map<const Eigen::VectorXd>(waypoints.data(), nq);
  for (Eigen::Index i = 0; i < times.size(); ++i) x(nq + i) = paramFromTime(times(i));
  return x;
}

void unpackDecision(const Eigen::VectorXd& x, int segments, Eigen::Matrix3Xd& waypoints,
                    Eigen::VectorXd& times) {
  const Eigen::Index nq = 3 * (segments - 1);
  waypoints = Eigen::Map<const Eigen::Matrix3Xd>(x.data(), 3, segments - 1);
  times.resize(segments);
  for (int i = 0; i < segments; ++i) times(i) = timeFromParam(x(nq + i));
}

double totalObjective(const OptimizationProblem& problem, const Eigen::VectorXd& x,
                      Eigen::VectorXd& grad, ObjectiveBreakdown* breakdown) {
  const int m = problem.segmentCount();
  Eigen::Matrix3Xd q;
  Eigen::VectorXd times;
  unpackDecision(x, m, q, times);
  const MincoTrajectory traj = MincoTrajectory::construct(problem.head, problem.tail, q, times);

  CostGradient total = smoothnessCost(traj, problem.weights.rho);
  const double smooth = total.value;
  FeasibilityBreakdown feas_parts;
  const CostGradient feas =
      feasibilityPenalty(traj, problem.limits, problem.weights, problem.resolution, &feas_parts);
  const CostGradient body = wholebodyPenalty(traj, problem.polygons, problem.shape,
                                             problem.weights, problem.resolution);
  total += feas;
  total += body;

  const MincoTrajectory::Gradient g = traj.propagateGradient(total.dc, total.dT);
  const Eigen::Index nq = 3 * (m - 1);
  grad.resize(x.size());
  grad.head(nq) = Eigen::Map<const Eigen::VectorXd>(g.waypoints.data(), nq);
  for (int i = 0; i < m; ++i) grad(nq + i) = g.times(i) * timeParamDerivative(x(nq + i));

  if (breakdown) {
    breakdown->smoothness = smooth;
    breakdown->velocity = feas_parts.velocity;
    breakdown->acceleration = feas_parts.acceleration;
    breakdown->yaw_rate = feas_parts.yaw_rate;
    breakdown->wholebody = body.value;
  }
  return total.value;
}

const char* toString(OptimizeStatus status) noexcept {
  switch (status) {
    case OptimizeStatus::kSuccess: return "success";
    case OptimizeStatus::kOptimizationFailed: return "optimization-failed";
    case OptimizeStatus::kUnsafeTrajectory: return "unsafe-trajectory";
  }
  return "unknown";
}

bool trajectoryCollisionFree(const OccupancyGrid& grid, const RobotShape& shape,
                             const MincoTrajectory& traj, double dt) {
  const double total = traj.totalDuration();
  const auto n = static_cast<long>(std::floor(total / dt));
  for (long k = 0; k <= n + 1; ++k) {
    const double t = std::min(k * dt, total);
    const Eigen::Vector3d p = traj.eval(t, 0);
    if (poseInCollision(grid, shape, Pose2{p.x(), p.y(), p.z()})) return false;
  }
  return true;
}

OptimizedTrajectory optimize(const OptimizationProblem& problem) {
  problem.validate();
  const auto started = std::chrono::steady_clock::now();
  OptimizedTrajectory out;
  OptimizationProblem work = problem;
  const int m = work.segmentCount();
  Eigen::VectorXd x = packDecision(work.initial_waypoints, work.initial_times);

  auto build = [&](const Eigen::VectorXd& xv) {
    Eigen::Matrix3Xd q;
    Eigen::VectorXd times;
    unpackDecision(xv, m, q, times);
    return MincoTrajectory::construct(work.head, work.tail, q, times);
  };

  for (int round = 0;; ++round) {
    ObjectiveBreakdown last_parts;
    const LbfgsObjective objective = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& g) {
      return totalObjective(work, xv, g, &last_parts);
    };
    const LbfgsProgress progress = [&](int iter, const Eigen::VectorXd&, double f,
                                       const Eigen::VectorXd& g) {
      out.history.push_back({round, iter, f, g.norm(), last_parts});
      return true;
    };
    const LbfgsResult res = minimizeLbfgs(objective, x, work.settings.lbfgs, progress);
    out.iterations += res.iterations;
    out.solver_status = res.status;
    out.trajectory = build(x);
    Eigen::VectorXd scratch;
    totalObjective(work, x, scratch, &out.final_parts);
    out.final_w_p = work.weights.w_p;

    if (res.status == LbfgsStatus::kLineSearchFailed) {
      out.status = OptimizeStatus::kOptimizationFailed;
      break;
    }
    if (work.grid == nullptr ||
        trajectoryCollisionFree(*work.grid, work.shape, out.trajectory,
                                0.5 * work.weights.delta_t)) {
      out.status = OptimizeStatus::kSuccess;
      break;
    }
    if (round >= work.settings.max_escalations) {
      out.status = OptimizeStatus::kUnsafeTrajectory;
      break;
    }
    work.weights.w_p *= 10.0;
    ++out.escalations;
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

void writeDiagnosticsCsv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "round,iteration,objective,gradient_norm,smoothness,velocity,acceleration,yaw_rate,"
         "wholebody\n";
  out << std::setprecision(12);
  for (const auto& r : history) {
    out << r.round << ',' << r.iteration << ',' << r.objective << ',' << r.gradient_norm << ','
        << r.parts.smoothness << ',' << r.parts.velocity << ',' << r.parts.acceleration << ','
        << r.parts.yaw_rate << ',' << r.parts.wholebody << '\n';
  }
}

}  // namespace wbplan
