#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wbplan/geometry.hpp"
#include "wbplan/gridmap.hpp"

namespace wbplan {

struct SearchState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  Pose2 pose() const { return {x, y, psi}; }
  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector2d velocity() const { return {vx, vy}; }

  friend bool operator==(const SearchState&, const SearchState&) = default;
};

struct ControlInput {
  double ax = 0.0;
  double ay = 0.0;
  double wz = 0.0;

  double squaredNorm() const { return ax * ax + ay * ay + wz * wz; }
};

/// Double integrator in (x, y) plus yaw integrator under constant input.
SearchState propagate(const SearchState& state, const ControlInput& input, double dt);

struct MotionPrimitive {
  SearchState start;
  ControlInput input;
  double duration = 0.0;

  SearchState stateAt(double t) const { return propagate(start, input, t); }
  SearchState end() const { return propagate(start, input, duration); }
};

struct SearchLimits {
  double v_max = 1.0;
  double a_max = 2.0;
  double w_max = 1.0;
  double tau = 0.5;      // longest primitive duration
  int r = 1;             // inputs per axis: 2r + 1
  int p = 2;             // durations tau/p, ..., tau
  double rho = 1.0;      // time weight
  double lambda_t = 1.0; // heading/tangent alignment weight

  void validate() const;
};

struct SearchOptions {
  int n_checks = 10;               // collision checkpoints per primitive
  double xy_resolution = 0.2;      // pruning cell (m)
  double yaw_resolution = 0.17453292519943295;  // pruning bin, 10 deg
  double goal_speed_tolerance = 0.2;
  double alignment_min_speed = 0.05;
  std::size_t node_budget = 300000;  // expansions
  /// Pop observer, called with (f_c, g_c) of each node taken from the open set.
  std::function<void(double, double)> on_pop;
};

/// (ax, ay, wz) on the uniform (2r+1)-point grid of each axis, crossed with
/// durations tau/p .. tau.
std::vector<std::pair<ControlInput, double>> enumerateInputs(const SearchLimits& limits);

/// Checks the whole-body footprint at t = k * duration / n_checks, k = 1..n_checks.
bool primitiveCollisionFree(const OccupancyGrid& grid, const RobotShape& shape,
                            const MotionPrimitive& prim, int n_checks);

/// Control and time cost plus the heading/tangent alignment term, evaluated
/// at the primitive end. The alignment term is dropped below min_speed.
double edgeCost(const MotionPrimitive& prim, const SearchLimits& limits,
                double min_speed = 0.05);

/// Minimum over T > 0 of the optimal control energy of a 2-D double
/// integrator from (p0, v0) to (p1, v1) plus rho * T. Yaw is ignored.
/// The minimizing T is written to optimal_time when requested.
double heuristic(const SearchState& state, const SearchState& goal, double rho,
                 double* optimal_time = nullptr);

/// Closed-form cubic connection in (x, y) with linear yaw, as produced by
/// analyticExpand.
struct ShotSegment {
  SearchState start;
  SearchState goal;
  double duration = 0.0;
  Eigen::Matrix<double, 2, 4> coeffs;  // column k multiplies t^k
  double yaw_change = 0.0;

  SearchState stateAt(double t) const;
  Eigen::Vector2d accelerationAt(double t) const;
};

std::optional<ShotSegment> analyticExpand(const SearchState& state, const SearchState& goal,
                                          const OccupancyGrid& grid, const RobotShape& shape,
                                          const SearchLimits& limits,
                                          const SearchOptions& options = {});

enum class SearchStatus {
  kSuccess,
  kNoPath,
  kBudgetExceeded,
  kStartInCollision,
};

const char* toString(SearchStatus status) noexcept;

struct PathResult {
  SearchStatus status = SearchStatus::kNoPath;
  std::vector<SearchState> states;          // node states, start first
  std::vector<MotionPrimitive> primitives;  // states.size() - 1 entries
  std::optional<ShotSegment> shot;          // final analytic connection
  double cost = 0.0;                        // g_c of the last node
  std::size_t expansions = 0;

  bool ok() const noexcept { return status == SearchStatus::kSuccess; }
  double duration() const;
  SearchState stateAt(double t) const;
  SearchState endState() const;
};

PathResult search(const OccupancyGrid& grid, const RobotShape& shape,
                  const SearchLimits& limits, const SearchState& start,
                  const SearchState& goal, const SearchOptions& options = {});

}  // namespace wbplan
