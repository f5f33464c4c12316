#include "wbplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "wbplan/error.hpp"

namespace wbplan {

void RobotShape::validate() const {
  if (!(length > 0.0) || !(width > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "robot length and width must be positive");
  }
  if (edge_samples_per_side < 2) {
    throw Error(ErrorCode::kInvalidArgument, "edge_samples_per_side must be at least 2");
  }
}

double wrapAngle(double angle) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

Eigen::Matrix2d rotation(double psi) noexcept {
  const double c = std::cos(psi), s = std::sin(psi);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix2d rotationDerivative(double psi) noexcept {
  const double c = std::cos(psi), s = std::sin(psi);
  Eigen::Matrix2d r;
  r << -s, -c, c, -s;
  return r;
}

std::array<Eigen::Vector2d, 4> bodyVertices(const RobotShape& shape) {
  const double hl = 0.5 * shape.length, hw = 0.5 * shape.width;
  return {Eigen::Vector2d(hl, hw), Eigen::Vector2d(-hl, hw), Eigen::Vector2d(-hl, -hw),
          Eigen::Vector2d(hl, -hw)};
}

std::array<Eigen::Vector2d, 4> obbVertices(const RobotShape& shape, const Pose2& pose) {
  const Eigen::Matrix2d r = rotation(pose.psi);
  const Eigen::Vector2d t = pose.position();
  auto verts = bodyVertices(shape);
  for (auto& v : verts) v = r * v + t;
  return verts;
}

std::vector<Eigen::Vector2d> bodyEdgeSamples(const RobotShape& shape) {
  shape.validate();
  const auto corners = bodyVertices(shape);
  const int segs = shape.edge_samples_per_side - 1;
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(4 * segs);
  for (int e = 0; e < 4; ++e) {
    const Eigen::Vector2d& a = corners[e];
    const Eigen::Vector2d& b = corners[(e + 1) % 4];
    for (int k = 0; k < segs; ++k) {
      const double s = static_cast<double>(k) / segs;
      pts.push_back((1.0 - s) * a + s * b);
    }
  }
  return pts;
}

std::vector<Eigen::Vector2d> edgeSamplePoints(const RobotShape& shape, const Pose2& pose) {
  const Eigen::Matrix2d r = rotation(pose.psi);
  const Eigen::Vector2d t = pose.position();
  auto pts = bodyEdgeSamples(shape);
  for (auto& p : pts) p = r * p + t;
  return pts;
}

ConvexPolygon::ConvexPolygon(std::vector<Eigen::Vector2d> normals, std::vector<double> offsets)
    : normals_(std::move(normals)), offsets_(std::move(offsets)) {
  if (normals_.size() != offsets_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "polygon needs one offset per normal");
  }
  for (std::size_t k = 0; k < normals_.size(); ++k) {
    const double n = normals_[k].norm();
    if (!(n > 0.0)) throw Error(ErrorCode::kInvalidArgument, "polygon normal has zero length");
    normals_[k] /= n;
    offsets_[k] /= n;
  }
}

ConvexPolygon ConvexPolygon::box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
  return ConvexPolygon({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(-1, 0),
                        Eigen::Vector2d(0, -1)},
                       {hi.x(), hi.y(), -lo.x(), -lo.y()});
}

bool ConvexPolygon::contains(const Eigen::Vector2d& q, double tol) const {
  for (std::size_t k = 0; k < normals_.size(); ++k) {
    if (normals_[k].dot(q) - offsets_[k] > tol) return false;
  }
  return true;
}

Eigen::VectorXd ConvexPolygon::violations(const Eigen::Vector2d& q) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(normals_.size()));
  for (std::size_t k = 0; k < normals_.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = normals_[k].dot(q) - offsets_[k];
  }
  return v;
}

std::vector<Eigen::Vector2d> ConvexPolygon::vertices() const {
  const std::size_t n = normals_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return std::atan2(normals_[a].y(), normals_[a].x()) <
           std::atan2(normals_[b].y(), normals_[b].x());
  });
  std::vector<Eigen::Vector2d> verts;
  verts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = order[k], b = order[(k + 1) % n];
    Eigen::Matrix2d m;
    m.row(0) = normals_[a].transpose();
    m.row(1) = normals_[b].transpose();
    if (std::abs(m.determinant()) < 1e-12) continue;
    verts.push_back(m.inverse() * Eigen::Vector2d(offsets_[a], offsets_[b]));
  }
  return verts;
}

ConvexPolygon ConvexPolygon::offsetBy(double delta) const {
  ConvexPolygon out = *this;
  for (double& b : out.offsets_) b += delta;
  return out;
}

}  // namespace wbplan
