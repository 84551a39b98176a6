#pragma once

#include "adasgd/core/types.hpp"

namespace adasgd {

/// Axis-aligned box [lower, upper] in R^m, or all of R^m in unbounded mode.
class BoxProjection {
 public:
  /// Unbounded projection of the given dimension (identity map).
  static BoxProjection unbounded(Eigen::Index dim);

  /// Throws std::invalid_argument if dimensions differ or lower > upper anywhere.
  BoxProjection(Eigen::VectorXd lower, Eigen::VectorXd upper);

  Eigen::Index dimension() const { return lower_.size(); }
  bool is_unbounded() const { return unbounded_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  bool contains(const ThetaVector& theta) const;

  /// Componentwise clamp. Throws std::invalid_argument on dimension mismatch or NaN input.
  ThetaVector project(const ThetaVector& theta) const;

 private:
  BoxProjection() = default;

  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  bool unbounded_ = false;
};

inline ThetaVector project(const BoxProjection& box, const ThetaVector& theta) {
  return box.project(theta);
}

}  // namespace adasgd
