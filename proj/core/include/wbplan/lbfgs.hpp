#pragma once

#include <functional>

#include <Eigen/Core>

namespace wbplan {

struct LbfgsParams {
  int memory = 8;
  /// Converged when |g| <= g_epsilon * max(1, |f|).
  double g_epsilon = 1e-5;
  int max_iterations = 2000;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature (strong Wolfe)
  int max_line_search = 60;
  /// Line-search failures tolerated; each one drops the curvature history.
  int max_restarts = 3;
};

enum class LbfgsStatus {
  kConverged,
  kMaxIterations,
  kLineSearchFailed,
  kStopped,
};

const char* toString(LbfgsStatus status) noexcept;

struct LbfgsResult {
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  int iterations = 0;
  int evaluations = 0;
  double value = 0.0;
  double gradient_norm = 0.0;
};

/// f(x, grad) returns the objective and writes its gradient.
using LbfgsObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;
/// Called after every accepted step; returning false stops the solver.
using LbfgsProgress =
    std::function<bool(int iteration, const Eigen::VectorXd& x, double f, const Eigen::VectorXd& g)>;

/// Limited-memory BFGS with a strong-Wolfe line search. On return x holds the
/// best iterate found, whatever the status.
LbfgsResult minimizeLbfgs(const LbfgsObjective& objective, Eigen::VectorXd& x,
                          const LbfgsParams& params = {}, const LbfgsProgress& progress = {});

}  // namespace wbplan
