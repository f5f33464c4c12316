#include "wbplan/search.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <queue>
#include <unordered_map>

#include <unsupported/Eigen/Polynomials>

#include "wbplan/collision.hpp"
#include "wbplan/error.hpp"

namespace wbplan {

void SearchLimits::validate() const {
  if (!(v_max > 0.0 && a_max > 0.0 && w_max > 0.0 && tau > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "search limits must be positive");
  }
  if (r < 1 || p < 1) throw Error(ErrorCode::kInvalidArgument, "r and p must be at least 1");
  if (rho < 0.0 || lambda_t < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "search weights must be non-negative");
  }
}

SearchState propagate(const SearchState& s, const ControlInput& u, double dt) {
  SearchState out;
  out.x = s.x + s.vx * dt + 0.5 * u.ax * dt * dt;
  out.y = s.y + s.vy * dt + 0.5 * u.ay * dt * dt;
  out.psi = s.psi + u.wz * dt;
  out.vx = s.vx + u.ax * dt;
  out.vy = s.vy + u.ay * dt;
  return out;
}

std::vector<std::pair<ControlInput, double>> enumerateInputs(const SearchLimits& limits) {
  limits.validate();
  std::vector<std::pair<ControlInput, double>> out;
  const int n = 2 * limits.r + 1;
  out.reserve(static_cast<std::size_t>(limits.p) * n * n * n);
  auto level = [&](int k, double u_max) { return u_max * static_cast<double>(k) / limits.r; };
  for (int d = 1; d <= limits.p; ++d) {
    const double duration = limits.tau * d / limits.p;
    for (int ix = -limits.r; ix <= limits.r; ++ix) {
      for (int iy = -limits.r; iy <= limits.r; ++iy) {
        for (int iw = -limits.r; iw <= limits.r; ++iw) {
          out.push_back({ControlInput{level(ix, limits.a_max), level(iy, limits.a_max),
                                      level(iw, limits.w_max)},
                         duration});
        }
      }
    }
  }
  return out;
}

bool primitiveCollisionFree(const OccupancyGrid& grid, const RobotShape& shape,
                            const MotionPrimitive& prim, int n_checks) {
  n_checks = std::max(n_checks, 1);
  for (int k = 1; k <= n_checks; ++k) {
    const double t = prim.duration * k / n_checks;
    if (poseInCollision(grid, shape, prim.stateAt(t).pose())) return false;
  }
  return true;
}

double edgeCost(const MotionPrimitive& prim, const SearchLimits& limits, double min_speed) {
  const SearchState end = prim.end();
  double cost = (prim.input.squaredNorm() + limits.rho) * prim.duration;
  if (std::hypot(end.vx, end.vy) >= min_speed) {
    const double mismatch = wrapAngle(std::atan2(end.vy, end.vx) - end.psi);
    cost += limits.lambda_t * mismatch * mismatch;
  }
  return cost;
}

namespace {

// Optimal energy of the fixed-time double-integrator connection.
double connectionEnergy(const Eigen::Vector2d& dp, const Eigen::Vector2d& v0,
                        const Eigen::Vector2d& v1, double T) {
  const double a = dp.squaredNorm();
  const double b = (v0 + v1).dot(dp);
  const double c = v0.squaredNorm() + v0.dot(v1) + v1.squaredNorm();
  return 12.0 * a / (T * T * T) - 12.0 * b / (T * T) + 4.0 * c / T;
}

}  // namespace

double heuristic(const SearchState& state, const SearchState& goal, double rho,
                 double* optimal_time) {
  const Eigen::Vector2d dp = goal.position() - state.position();
  const Eigen::Vector2d v0 = state.velocity();
  const Eigen::Vector2d v1 = goal.velocity();

  const double c1 = -36.0 * dp.squaredNorm();
  const double c2 = 24.0 * (v0 + v1).dot(dp);
  const double c3 = -4.0 * (v0.squaredNorm() + v0.dot(v1) + v1.squaredNorm());

  if (optimal_time) *optimal_time = 0.0;
  if (c1 == 0.0 && c2 == 0.0 && c3 == 0.0) return 0.0;
  if (!(rho > 0.0)) return 0.0;  // infimum approached as T grows without bound

  // Stationarity of J(T): rho T^4 + c3 T^2 + c2 T + c1 = 0.
  Eigen::Matrix<double, 5, 1> poly;
  poly << c1, c2, c3, 0.0, rho;
  Eigen::PolynomialSolver<double, 4> solver(poly);

  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (const std::complex<double>& root : solver.roots()) {
    const double t = root.real();
    if (!(t > 0.0) || std::abs(root.imag()) > 1e-8 * std::max(1.0, std::abs(t))) continue;
    const double cost = connectionEnergy(dp, v0, v1, t) + rho * t;
    if (cost < best) {
      best = cost;
      best_t = t;
    }
  }
  if (!std::isfinite(best)) return 0.0;
  if (optimal_time) *optimal_time = best_t;
  return std::max(best, 0.0);
}

SearchState ShotSegment::stateAt(double t) const {
  t = std::clamp(t, 0.0, duration);
  const Eigen::Vector4d basis(1.0, t, t * t, t * t * t);
  const Eigen::Vector4d dbasis(0.0, 1.0, 2.0 * t, 3.0 * t * t);
  const Eigen::Vector2d p = coeffs * basis;
  const Eigen::Vector2d v = coeffs * dbasis;
  const double s = duration > 0.0 ? t / duration : 1.0;
  return {p.x(), p.y(), start.psi + s * yaw_change, v.x(), v.y()};
}

Eigen::Vector2d ShotSegment::accelerationAt(double t) const {
  return coeffs.col(2) * 2.0 + coeffs.col(3) * (6.0 * t);
}

std::optional<ShotSegment> analyticExpand(const SearchState& state, const SearchState& goal,
                                          const OccupancyGrid& grid, const RobotShape& shape,
                                          const SearchLimits& limits,
                                          const SearchOptions& options) {
  double T = 0.0;
  heuristic(state, goal, limits.rho, &T);
  if (!(T > 0.0)) return std::nullopt;

  const Eigen::Vector2d p0 = state.position(), v0 = state.velocity();
  const Eigen::Vector2d p1 = goal.position(), v1 = goal.velocity();
  const Eigen::Vector2d dp = p1 - p0 - v0 * T;
  const Eigen::Vector2d dv = v1 - v0;

  ShotSegment shot;
  shot.start = state;
  shot.duration = T;
  shot.coeffs.col(0) = p0;
  shot.coeffs.col(1) = v0;
  shot.coeffs.col(2) = 0.5 * (6.0 / (T * T) * dp - 2.0 / T * dv);
  shot.coeffs.col(3) = (-12.0 / (T * T * T) * dp + 6.0 / (T * T) * dv) / 6.0;
  shot.yaw_change = wrapAngle(goal.psi - state.psi);
  shot.goal = goal;
  shot.goal.psi = state.psi + shot.yaw_change;

  if (std::abs(shot.yaw_change) / T > limits.w_max + 1e-9) return std::nullopt;

  // Acceleration is affine in t, so its bound is checked at the ends; the
  // velocity quadratic also at its vertex.
  constexpr double kTol = 1e-9;
  for (const double t : {0.0, T}) {
    const Eigen::Vector2d a = shot.accelerationAt(t);
    if (a.cwiseAbs().maxCoeff() > limits.a_max + kTol) return std::nullopt;
  }
  std::vector<double> v_checks{0.0, T};
  for (int d = 0; d < 2; ++d) {
    const double c3 = shot.coeffs(d, 3), c2 = shot.coeffs(d, 2);
    if (c3 != 0.0) {
      const double tv = -c2 / (3.0 * c3);
      if (tv > 0.0 && tv < T) v_checks.push_back(tv);
    }
  }
  for (const double t : v_checks) {
    const SearchState s = shot.stateAt(t);
    if (std::max(std::abs(s.vx), std::abs(s.vy)) > limits.v_max + kTol) return std::nullopt;
  }

  // Collision samples: at least n_checks, and no more than half a cell of
  // travel between consecutive samples.
  double length = 0.0;
  {
    Eigen::Vector2d prev = p0;
    constexpr int kArc = 32;
    for (int k = 1; k <= kArc; ++k) {
      const Eigen::Vector2d cur = shot.stateAt(T * k / kArc).position();
      length += (cur - prev).norm();
      prev = cur;
    }
  }
  const double sweep = length + 0.5 * shape.length * std::abs(shot.yaw_change);
  const int samples = std::max(options.n_checks,
                               static_cast<int>(std::ceil(sweep / (0.5 * grid.resolution()))));
  for (int k = 1; k <= samples; ++k) {
    if (poseInCollision(grid, shape, shot.stateAt(T * k / samples).pose())) return std::nullopt;
  }
  return shot;
}

const char* toString(SearchStatus status) noexcept {
  switch (status) {
    case SearchStatus::kSuccess: return "success";
    case SearchStatus::kNoPath: return "no-path";
    case SearchStatus::kBudgetExceeded: return "budget-exceeded";
    case SearchStatus::kStartInCollision: return "start-in-collision";
  }
  return "unknown";
}

double PathResult::duration() const {
  double t = 0.0;
  for (const auto& prim : primitives) t += prim.duration;
  if (shot) t += shot->duration;
  return t;
}

SearchState PathResult::stateAt(double t) const {
  if (states.empty()) return {};
  if (t <= 0.0) return states.front();
  for (const auto& prim : primitives) {
    if (t <= prim.duration) return prim.stateAt(t);
    t -= prim.duration;
  }
  if (shot) return shot->stateAt(std::min(t, shot->duration));
  return states.back();
}

SearchState PathResult::endState() const {
  if (shot) return shot->goal;
  return states.empty() ? SearchState{} : states.back();
}

namespace {

struct PruneKey {
  int ix, iy, ipsi;
  friend bool operator==(const PruneKey&, const PruneKey&) = default;
};

struct PruneKeyHash {
  std::size_t operator()(const PruneKey& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(static_cast<std::uint32_t>(k.ix));
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(k.iy);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(k.ipsi);
    return h;
  }
};

struct Node {
  SearchState state;
  double g = 0.0;
  double f = 0.0;
  std::ptrdiff_t parent = -1;
  MotionPrimitive arrival;
  bool closed = false;
};

struct OpenEntry {
  double f;
  std::size_t seq;
  std::size_t node;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    return seq > o.seq;
  }
};

}  // namespace

PathResult search(const OccupancyGrid& grid, const RobotShape& shape,
                  const SearchLimits& limits, const SearchState& start,
                  const SearchState& goal, const SearchOptions& options) {
  limits.validate();
  shape.validate();
  PathResult result;
  if (poseInCollision(grid, shape, start.pose())) {
    result.status = SearchStatus::kStartInCollision;
    return result;
  }
  if (poseInCollision(grid, shape, goal.pose())) {
    result.status = SearchStatus::kNoPath;  // nothing can reach an occupied goal pose
    return result;
  }

  const double two_pi = 2.0 * 3.14159265358979323846;
  const int yaw_bins = std::max(1, static_cast<int>(std::lround(two_pi / options.yaw_resolution)));
  auto key_of = [&](const SearchState& s) {
    const double psi = wrapAngle(s.psi) + 0.5 * two_pi;  // [0, 2pi)
    int ipsi = static_cast<int>(std::floor(psi / two_pi * yaw_bins));
    ipsi = ((ipsi % yaw_bins) + yaw_bins) % yaw_bins;
    return PruneKey{static_cast<int>(std::floor((s.x - grid.origin().x()) / options.xy_resolution)),
                    static_cast<int>(std::floor((s.y - grid.origin().y()) / options.xy_resolution)),
                    ipsi};
  };
  const PruneKey goal_key = key_of(goal);
  auto reached_goal = [&](const SearchState& s) {
    const PruneKey k = key_of(s);
    return k == goal_key && std::hypot(s.vx, s.vy) < options.goal_speed_tolerance;
  };

  const auto inputs = enumerateInputs(limits);
  std::deque<Node> nodes;
  std::unordered_map<PruneKey, std::size_t, PruneKeyHash> index;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  std::size_t seq = 0;

  nodes.push_back(Node{start, 0.0, heuristic(start, goal, limits.rho), -1, {}, false});
  index.emplace(key_of(start), 0);
  open.push({nodes[0].f, seq++, 0});

  auto finish = [&](std::size_t last, std::optional<ShotSegment> shot) {
    std::vector<std::size_t> chain;
    for (std::ptrdiff_t n = static_cast<std::ptrdiff_t>(last); n >= 0; n = nodes[n].parent) {
      chain.push_back(static_cast<std::size_t>(n));
    }
    std::reverse(chain.begin(), chain.end());
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const Node& node = nodes[chain[k]];
      result.states.push_back(node.state);
      if (k > 0) result.primitives.push_back(node.arrival);
    }
    result.shot = std::move(shot);
    result.cost = nodes[last].g;
    result.status = SearchStatus::kSuccess;
  };

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    Node& current = nodes[top.node];
    if (current.closed || top.f != current.f) continue;  // stale entry
    current.closed = true;
    if (options.on_pop) options.on_pop(current.f, current.g);

    if (reached_goal(current.state)) {
      finish(top.node, std::nullopt);
      return result;
    }
    if (auto shot = analyticExpand(current.state, goal, grid, shape, limits, options)) {
      finish(top.node, std::move(shot));
      return result;
    }
    if (++result.expansions > options.node_budget) {
      result.status = SearchStatus::kBudgetExceeded;
      return result;
    }

    const SearchState cur_state = current.state;
    const double cur_g = current.g;
    const PruneKey cur_key = key_of(cur_state);
    for (const auto& [input, duration] : inputs) {
      const MotionPrimitive prim{cur_state, input, duration};
      const SearchState next = prim.end();
      if (std::abs(next.vx) > limits.v_max + 1e-9 || std::abs(next.vy) > limits.v_max + 1e-9) {
        continue;
      }
      const PruneKey key = key_of(next);
      if (key == cur_key) continue;
      const auto it = index.find(key);
      if (it != index.end() && nodes[it->second].closed) continue;

      const double g = cur_g + edgeCost(prim, limits, options.alignment_min_speed);
      if (it != index.end() && g >= nodes[it->second].g) continue;
      if (!primitiveCollisionFree(grid, shape, prim, options.n_checks)) continue;

      const double f = g + heuristic(next, goal, limits.rho);
      std::size_t id;
      if (it == index.end()) {
        id = nodes.size();
        nodes.push_back(Node{next, g, f, static_cast<std::ptrdiff_t>(top.node), prim, false});
        index.emplace(key, id);
      } else {
        id = it->second;
        Node& n = nodes[id];
        n.state = next;
        n.g = g;
        n.f = f;
        n.parent = static_cast<std::ptrdiff_t>(top.node);
        n.arrival = prim;
      }
      open.push({f, seq++, id});
    }
  }
  result.status = SearchStatus::kNoPath;
  return result;
}

}  // namespace wbplan
