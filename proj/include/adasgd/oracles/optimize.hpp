#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

#include "adasgd/core/projection.hpp"

namespace adasgd::oracles {

struct GridOptimum {
  Eigen::VectorXd point;
  double value = 0.0;
  bool on_boundary = false;  ///< refined optimum within the tolerance of a face of the domain
  std::string diagnostic;    ///< set when on_boundary
  int evaluations = 0;
};

using ScalarLoss = std::function<double(const Eigen::VectorXd&)>;

/// Coarse grid scan followed by a local refine: golden-section in 1-D,
/// box-clamped Nelder-Mead in 2-D. Losses that throw or return non-finite
/// values are treated as +inf. Parameter tolerance defaults to 1e-6.
GridOptimum grid_optimum(const ScalarLoss& loss, const BoxProjection& domain, double coarse_step,
                         double tolerance = 1e-6);

/// 1-D convenience overload on [lower, upper].
GridOptimum grid_optimum(const std::function<double(double)>& loss, double lower, double upper,
                         double coarse_step, double tolerance = 1e-6);

}  // namespace adasgd::oracles
