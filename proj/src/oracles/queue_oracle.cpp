#include "adasgd/oracles/queue_oracle.hpp"

#include <stdexcept>

namespace adasgd::oracles {

namespace {

double stable_rate(const queue::QueueTheta& theta, const queue::QueueParams& params) {
  const double lambda = queue::demand_rate(theta.p, params);
  if (!(lambda < theta.mu)) throw std::domain_error("unstable configuration");
  return lambda;
}

}  // namespace

double mm1_mean_wait(const queue::QueueTheta& theta, const queue::QueueParams& params) {
  const double lambda = stable_rate(theta, params);
  return lambda / (theta.mu * (theta.mu - lambda));
}

double mm1_mean_busy(const queue::QueueTheta& theta, const queue::QueueParams& params) {
  const double lambda = stable_rate(theta, params);
  return lambda / ((theta.mu - lambda) * (theta.mu - lambda));
}

Eigen::Vector2d mm1_gradient(const queue::QueueTheta& theta, const queue::QueueParams& params) {
  const double lambda = stable_rate(theta, params);
  const double dlambda = queue::demand_slope(theta.p, params);
  const double gap2 = (theta.mu - lambda) * (theta.mu - lambda);
  Eigen::Vector2d g;
  g[0] = 2.0 * params.c0 * theta.mu - params.h0 * lambda / gap2;
  g[1] = -lambda - theta.p * dlambda + params.h0 * dlambda * theta.mu / gap2;
  return g;
}

GridOptimum mm1_optimum(const queue::QueueParams& params, double coarse_step) {
  params.validate();
  return grid_optimum(
      [&](const Eigen::VectorXd& x) { return queue::mm1_loss(queue::QueueTheta::from_vector(x), params); },
      params.box(), coarse_step);
}

}  // namespace adasgd::oracles
