#pragma once

#include <vector>

#include <Eigen/Core>

namespace wbplan {

/// Square banded matrix with in-place LU factorization (no pivoting) and
/// direct/transposed solves against multi-column right-hand sides.
class BandedSystem {
 public:
  static constexpr double kPivotTolerance = 1e-12;

  BandedSystem() = default;
  BandedSystem(int n, int lower, int upper);

  int size() const noexcept { return n_; }
  void setZero();

  double& operator()(int i, int j) { return data_[(i - j + upper_) * n_ + j]; }
  double operator()(int i, int j) const { return data_[(i - j + upper_) * n_ + j]; }

  /// Throws Error(kSingularSystem) when a pivot falls below kPivotTolerance.
  void factorizeLU();
  /// Solves A x = b in place. Requires factorizeLU().
  void solve(Eigen::Ref<Eigen::MatrixXd> b) const;
  /// Solves A^T x = b in place. Requires factorizeLU().
  void solveAdjoint(Eigen::Ref<Eigen::MatrixXd> b) const;

 private:
  int n_ = 0;
  int lower_ = 0;
  int upper_ = 0;
  std::vector<double> data_;
};

}  // namespace wbplan
