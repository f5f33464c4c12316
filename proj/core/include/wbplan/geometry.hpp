#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace wbplan {

/// Rectangular footprint. The body x axis runs along the long side.
struct RobotShape {
  double length = 0.4;
  double width = 0.15;
  int edge_samples_per_side = 5;

  /// Throws Error(kInvalidArgument) on non-positive sizes or fewer than two
  /// samples per side.
  void validate() const;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // unwrapped yaw

  Eigen::Vector2d position() const { return {x, y}; }
};

/// Wraps an angle into (-pi, pi].
double wrapAngle(double angle) noexcept;

Eigen::Matrix2d rotation(double psi) noexcept;
/// d rotation(psi) / d psi
Eigen::Matrix2d rotationDerivative(double psi) noexcept;

/// Body-frame corners, counterclockwise from (+length/2, +width/2).
std::array<Eigen::Vector2d, 4> bodyVertices(const RobotShape& shape);
std::array<Eigen::Vector2d, 4> obbVertices(const RobotShape& shape, const Pose2& pose);

/// Points spaced uniformly along the four box edges, each corner listed once:
/// 4 * (edge_samples_per_side - 1) points, starting at the first corner.
std::vector<Eigen::Vector2d> bodyEdgeSamples(const RobotShape& shape);
std::vector<Eigen::Vector2d> edgeSamplePoints(const RobotShape& shape, const Pose2& pose);

/// Convex polygon { q : A q <= b } with unit outward normals.
class ConvexPolygon {
 public:
  static constexpr double kContainTolerance = 1e-9;

  ConvexPolygon() = default;
  /// Normals are rescaled to unit length (offsets scaled with them). Throws
  /// Error(kInvalidArgument) on size mismatch or a zero normal.
  ConvexPolygon(std::vector<Eigen::Vector2d> normals, std::vector<double> offsets);

  /// Axis-aligned box [lo, hi].
  static ConvexPolygon box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);

  std::size_t faceCount() const noexcept { return normals_.size(); }
  const std::vector<Eigen::Vector2d>& normals() const noexcept { return normals_; }
  const std::vector<double>& offsets() const noexcept { return offsets_; }

  bool contains(const Eigen::Vector2d& q, double tol = kContainTolerance) const;
  /// A q - b per face; positive entries are penetration depths in meters.
  Eigen::VectorXd violations(const Eigen::Vector2d& q) const;

  /// Vertices in counterclockwise order, from intersecting consecutive faces
  /// sorted by normal angle. Requires a bounded polygon.
  std::vector<Eigen::Vector2d> vertices() const;

  /// Same polygon with every offset grown by delta.
  ConvexPolygon offsetBy(double delta) const;

 private:
  std::vector<Eigen::Vector2d> normals_;
  std::vector<double> offsets_;
};

}  // namespace wbplan
