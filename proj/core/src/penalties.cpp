#include "wbplan/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wbplan/error.hpp"

namespace wbplan {

void PenaltyWeights::validate() const {
  if (rho < 0.0 || w_v < 0.0 || w_a < 0.0 || w_w < 0.0 || w_p < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "penalty weights must be non-negative");
  }
  if (!(delta_t > 0.0) || !(mu > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta_t and mu must be positive");
  }
}

Relaxed smoothedL1(double x, double mu) noexcept {
  if (x <= 0.0) return {0.0, 0.0};
  if (x < mu) {
    const double mu3 = mu * mu * mu;
    return {(mu - 0.5 * x) * x * x * x / mu3, (3.0 * mu - 2.0 * x) * x * x / mu3};
  }
  return {x - 0.5 * mu, 1.0};
}

CostGradient CostGradient::zeros(int segments) {
  CostGradient g;
  g.dc = CoefficientMatrix::Zero(kMincoCoeffs * segments, kMincoChannels);
  g.dT = Eigen::VectorXd::Zero(segments);
  return g;
}

CostGradient& CostGradient::operator+=(const CostGradient& o) {
  value += o.value;
  dc += o.dc;
  dT += o.dT;
  return *this;
}

CostGradient smoothnessCost(const MincoTrajectory& traj, double rho) {
  const int m = traj.segmentCount();
  CostGradient out = CostGradient::zeros(m);
  const auto& c = traj.coefficients();
  for (int i = 0; i < m; ++i) {
    const double t1 = traj.times()(i), t2 = t1 * t1, t3 = t2 * t1, t4 = t2 * t2, t5 = t4 * t1;
    for (int d = 0; d < kMincoChannels; ++d) {
      const double c3 = c(6 * i + 3, d), c4 = c(6 * i + 4, d), c5 = c(6 * i + 5, d);
      out.value += 36.0 * c3 * c3 * t1 + 144.0 * c3 * c4 * t2 + 192.0 * c4 * c4 * t3 +
                   240.0 * c3 * c5 * t3 + 720.0 * c4 * c5 * t4 + 720.0 * c5 * c5 * t5;
      out.dc(6 * i + 3, d) = 72.0 * c3 * t1 + 144.0 * c4 * t2 + 240.0 * c5 * t3;
      out.dc(6 * i + 4, d) = 144.0 * c3 * t2 + 384.0 * c4 * t3 + 720.0 * c5 * t4;
      out.dc(6 * i + 5, d) = 240.0 * c3 * t3 + 720.0 * c4 * t4 + 1440.0 * c5 * t5;
    }
    const Eigen::Vector3d jerk_end = traj.evalSegment(i, t1, 3);
    out.dT(i) = jerk_end.squaredNorm() + rho;
    out.value += rho * t1;
  }
  return out;
}

std::vector<int> checkpointResolution(const Eigen::VectorXd& times, double delta_t) {
  std::vector<int> k(static_cast<std::size_t>(times.size()));
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    k[static_cast<std::size_t>(i)] =
        std::max(2, static_cast<int>(std::ceil(times(i) / delta_t - 1e-9)));
  }
  return k;
}

namespace {

void checkResolution(const MincoTrajectory& traj, std::span<const int> resolution) {
  if (static_cast<int>(resolution.size()) != traj.segmentCount()) {
    throw Error(ErrorCode::kConfiguration, "checkpoint resolution does not match segment count");
  }
  for (int k : resolution) {
    if (k < 1) throw Error(ErrorCode::kConfiguration, "checkpoint resolution must be positive");
  }
}

// Accumulates d/dc and d/dT for a checkpoint term that depends on the
// derivative of `order` of segment i at t = j T / K, through a value-space
// gradient `dv` (one entry per channel).
void chainCheckpoint(CostGradient& out, const MincoTrajectory& traj, int i, double t,
                     double time_fraction, int order, const Eigen::Vector3d& dv) {
  const auto basis = quinticBasis(t, order);
  out.dc.middleRows<kMincoCoeffs>(kMincoCoeffs * i) += basis.transpose() * dv.transpose();
  if (order < 5) {
    out.dT(i) += dv.dot(traj.evalSegment(i, t, order + 1)) * time_fraction;
  }
}

}  // namespace

CostGradient feasibilityPenalty(const MincoTrajectory& traj, const DynamicLimits& limits,
                                const PenaltyWeights& weights, std::span<const int> resolution,
                                FeasibilityBreakdown* breakdown) {
  checkResolution(traj, resolution);
  const int m = traj.segmentCount();
  CostGradient out = CostGradient::zeros(m);
  FeasibilityBreakdown parts;
  const double v2 = limits.v_max * limits.v_max;
  const double a2 = limits.a_max * limits.a_max;
  const double w2 = limits.w_max * limits.w_max;

  for (int i = 0; i < m; ++i) {
    const int k_count = resolution[static_cast<std::size_t>(i)];
    const double ti = traj.times()(i);
    const double step = ti / k_count;
    for (int j = 0; j <= k_count; ++j) {
      const double omega = (j == 0 || j == k_count) ? 0.5 : 1.0;
      const double frac = static_cast<double>(j) / k_count;  // dt_j / dT_i
      const double t = step * j;
      const Eigen::Vector3d vel = traj.evalSegment(i, t, 1);
      const Eigen::Vector3d acc = traj.evalSegment(i, t, 2);

      struct Term {
        double weight;
        double violation;
        Eigen::Vector3d dgrad;  // dG / d(derivative value)
        int order;
        double* sink;
      };
      const Term terms[] = {
          {weights.w_v, vel.head<2>().squaredNorm() - v2,
           Eigen::Vector3d(2.0 * vel.x(), 2.0 * vel.y(), 0.0), 1, &parts.velocity},
          {weights.w_a, acc.head<2>().squaredNorm() - a2,
           Eigen::Vector3d(2.0 * acc.x(), 2.0 * acc.y(), 0.0), 2, &parts.acceleration},
          {weights.w_w, vel.z() * vel.z() - w2, Eigen::Vector3d(0.0, 0.0, 2.0 * vel.z()), 1,
           &parts.yaw_rate},
      };
      for (const Term& term : terms) {
        if (term.weight == 0.0 || term.violation <= 0.0) continue;
        const Relaxed r = smoothedL1(term.violation, weights.mu);
        const double scale = term.weight * omega;
        const double value = scale * step * r.value;
        out.value += value;
        *term.sink += value;
        // d(step)/dT = 1/K
        out.dT(i) += scale * r.value / k_count;
        chainCheckpoint(out, traj, i, t, frac, term.order, scale * step * r.slope * term.dgrad);
      }
    }
  }
  if (breakdown) *breakdown = parts;
  return out;
}

CostGradient wholebodyPenalty(const MincoTrajectory& traj, std::span<const ConvexPolygon> polygons,
                              const RobotShape& shape, const PenaltyWeights& weights,
                              std::span<const int> resolution) {
  checkResolution(traj, resolution);
  const int m = traj.segmentCount();
  if (static_cast<int>(polygons.size()) != m + 1) {
    throw Error(ErrorCode::kConfiguration,
                "expected " + std::to_string(m + 1) + " corridor polygons, got " +
                    std::to_string(polygons.size()));
  }
  CostGradient out = CostGradient::zeros(m);
  if (weights.w_p == 0.0) return out;
  const auto body = bodyEdgeSamples(shape);

  struct Eval {
    double value = 0.0;
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();  // d/d(x, y, psi)
  };
  auto evaluate = [&](const ConvexPolygon& poly, const Eigen::Vector3d& pose) {
    Eval e;
    const Eigen::Matrix2d rot = rotation(pose.z());
    const Eigen::Matrix2d drot = rotationDerivative(pose.z());
    const auto& normals = poly.normals();
    const auto& offsets = poly.offsets();
    for (const auto& vb : body) {
      const Eigen::Vector2d w = rot * vb + pose.head<2>();
      const Eigen::Vector2d dw_dpsi = drot * vb;
      for (std::size_t f = 0; f < normals.size(); ++f) {
        const double g = normals[f].dot(w) - offsets[f];
        if (g <= 0.0) continue;
        const Relaxed r = smoothedL1(g, weights.mu);
        e.value += r.value;
        e.grad.head<2>() += r.slope * normals[f];
        e.grad.z() += r.slope * normals[f].dot(dw_dpsi);
      }
    }
    return e;
  };

  for (int i = 0; i < m; ++i) {
    const int k_count = resolution[static_cast<std::size_t>(i)];
    const double ti = traj.times()(i);
    const double step = ti / k_count;
    const ConvexPolygon& behind = polygons[static_cast<std::size_t>(i)];
    const ConvexPolygon& ahead = polygons[static_cast<std::size_t>(i + 1)];
    for (int j = 0; j <= k_count; ++j) {
      const double omega = (j == 0 || j == k_count) ? 0.5 : 1.0;
      const double frac = static_cast<double>(j) / k_count;
      const double t = step * j;
      const Eigen::Vector3d pose = traj.evalSegment(i, t, 0);
      const Eval e0 = evaluate(behind, pose);
      if (e0.value == 0.0) continue;
      const Eval e1 = evaluate(ahead, pose);
      const Eval& e = e1.value < e0.value ? e1 : e0;
      if (e.value == 0.0) continue;
      const double scale = weights.w_p * omega;
      out.value += scale * step * e.value;
      out.dT(i) += scale * e.value / k_count;
      chainCheckpoint(out, traj, i, t, frac, 0, scale * step * e.grad);
    }
  }
  return out;
}

}  // namespace wbplan
