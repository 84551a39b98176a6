#include "adasgd/core/projection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adasgd {

BoxProjection BoxProjection::unbounded(Eigen::Index dim) {
  BoxProjection box;
  const double inf = std::numeric_limits<double>::infinity();
  box.lower_ = Eigen::VectorXd::Constant(dim, -inf);
  box.upper_ = Eigen::VectorXd::Constant(dim, inf);
  box.unbounded_ = true;
  return box;
}

BoxProjection::BoxProjection(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    throw std::invalid_argument("box bounds must have the same non-zero dimension");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i]) {
      throw std::invalid_argument("box requires lower <= upper in every component");
    }
  }
}

bool BoxProjection::contains(const ThetaVector& theta) const {
  if (theta.size() != dimension()) return false;
  return ((theta.array() >= lower_.array()) && (theta.array() <= upper_.array())).all();
}

ThetaVector BoxProjection::project(const ThetaVector& theta) const {
  if (theta.size() != dimension()) {
    throw std::invalid_argument("projection dimension mismatch");
  }
  if (theta.hasNaN()) {
    throw std::invalid_argument("cannot project a NaN parameter");
  }
  if (unbounded_) return theta;
  return theta.cwiseMax(lower_).cwiseMin(upper_);
}

}  // namespace adasgd
