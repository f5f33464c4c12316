#include "wbplan/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace wbplan {

const char* toString(LbfgsStatus status) noexcept {
  switch (status) {
    case LbfgsStatus::kConverged: return "converged";
    case LbfgsStatus::kMaxIterations: return "max-iterations";
    case LbfgsStatus::kLineSearchFailed: return "line-search-failed";
    case LbfgsStatus::kStopped: return "stopped";
  }
  return "unknown";
}

namespace {

struct Sample {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative
};

// Minimizer of the cubic through two samples, or the midpoint when the
// interpolant is degenerate; kept inside the middle 80% of the bracket.
double interpolate(const Sample& lo, const Sample& hi) {
  const double a = lo.alpha, b = hi.alpha;
  const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (a - b);
  const double disc = d1 * d1 - lo.slope * hi.slope;
  double next = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = hi.slope - lo.slope + 2.0 * d2;
    if (denom != 0.0) {
      const double cand = b - (b - a) * (hi.slope + d2 - d1) / denom;
      if (std::isfinite(cand)) next = cand;
    }
  }
  const double left = std::min(a, b), right = std::max(a, b);
  const double margin = 0.1 * (right - left);
  return std::clamp(next, left + margin, right - margin);
}

}  // namespace

LbfgsResult minimizeLbfgs(const LbfgsObjective& objective, Eigen::VectorXd& x,
                          const LbfgsParams& params, const LbfgsProgress& progress) {
  LbfgsResult result;
  const Eigen::Index n = x.size();
  Eigen::VectorXd g(n);
  double f = objective(x, g);
  ++result.evaluations;

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd d(n), x_trial(n), g_trial(n);
  int restarts = 0;  // consecutive line-search failures

  auto converged = [&](double fv, const Eigen::VectorXd& gv) {
    return gv.norm() <= params.g_epsilon * std::max(1.0, std::abs(fv));
  };

  for (;;) {
    result.value = f;
    result.gradient_norm = g.norm();
    if (!std::isfinite(f) || converged(f, g)) {
      result.status = LbfgsStatus::kConverged;
      return result;
    }
    if (result.iterations >= params.max_iterations) {
      result.status = LbfgsStatus::kMaxIterations;
      return result;
    }

    // Two-loop recursion.
    d = -g;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(d);
      d += (alpha[k] - beta) * s_hist[k];
    }
    double slope0 = g.dot(d);
    if (!(slope0 < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      slope0 = -g.squaredNorm();
    }

    // Strong-Wolfe line search.
    const Sample origin{0.0, f, slope0};
    double f_trial = f;
    auto eval_at = [&](double a) {
      x_trial = x + a * d;
      const double fv = objective(x_trial, g_trial);
      f_trial = fv;
      ++result.evaluations;
      return Sample{a, std::isfinite(fv) ? fv : std::numeric_limits<double>::infinity(),
                    std::isfinite(fv) ? g_trial.dot(d) : 0.0};
    };
    auto sufficient = [&](const Sample& s) { return s.f <= f + params.c1 * s.alpha * slope0; };
    auto curvature = [&](const Sample& s) { return std::abs(s.slope) <= -params.c2 * slope0; };

    bool accepted = false;
    int evals = 0;
    auto zoom = [&](Sample lo, Sample hi) {
      while (evals < params.max_line_search) {
        const double a = std::isfinite(hi.f) ? interpolate(lo, hi) : 0.5 * (lo.alpha + hi.alpha);
        if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
        const Sample s = eval_at(a);
        ++evals;
        if (!sufficient(s) || s.f >= lo.f) {
          hi = s;
        } else {
          if (curvature(s)) return true;
          if (s.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
          lo = s;
        }
      }
      return false;
    };

    double a = s_hist.empty() ? std::min(1.0, 1.0 / std::max(d.norm(), 1e-300)) : 1.0;
    Sample prev = origin;
    while (evals < params.max_line_search) {
      const Sample s = eval_at(a);
      ++evals;
      if (!sufficient(s) || (evals > 1 && s.f >= prev.f)) {
        accepted = zoom(prev, s);
        break;
      }
      if (curvature(s)) {
        accepted = true;
        break;
      }
      if (s.slope >= 0.0) {
        accepted = zoom(s, prev);
        break;
      }
      prev = s;
      a *= 2.0;
    }

    if (!accepted) {
      if (++restarts > params.max_restarts) {
        result.status = LbfgsStatus::kLineSearchFailed;
        return result;
      }
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }

    // x_trial / g_trial hold the accepted point.
    Eigen::VectorXd s_vec = x_trial - x;
    Eigen::VectorXd y_vec = g_trial - g;
    x = x_trial;
    g = g_trial;
    f = f_trial;
    ++result.iterations;
    restarts = 0;

    const double sy = s_vec.dot(y_vec);
    if (sy > 1e-16 * y_vec.squaredNorm()) {
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > params.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (progress && !progress(result.iterations, x, f, g)) {
      result.value = f;
      result.gradient_norm = g.norm();
      result.status = LbfgsStatus::kStopped;
      return result;
    }
  }
}

}  // namespace wbplan
