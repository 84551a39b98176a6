#pragma once

#include <Eigen/Core>

#include "adasgd/env/queue.hpp"
#include "adasgd/oracles/optimize.hpp"

namespace adasgd::oracles {

/// Stationary M/M/1 waiting time in queue, lambda / (mu (mu - lambda)).
double mm1_mean_wait(const queue::QueueTheta& theta, const queue::QueueParams& params);

/// Stationary busy time seen by an arrival, lambda / (mu - lambda)^2.
double mm1_mean_busy(const queue::QueueTheta& theta, const queue::QueueParams& params);

/// Analytic gradient (d/dmu, d/dp) of mm1_loss:
///   d/dmu = 2 c0 mu - h0 lambda / (mu - lambda)^2
///   d/dp  = -lambda - p lambda' + h0 lambda' mu / (mu - lambda)^2
Eigen::Vector2d mm1_gradient(const queue::QueueTheta& theta, const queue::QueueParams& params);

/// Minimizer of mm1_loss over the parameter box.
GridOptimum mm1_optimum(const queue::QueueParams& params, double coarse_step = 0.05);

}  // namespace adasgd::oracles
