#include "adasgd/env/queue.hpp"

#include <cmath>
#include <stdexcept>

namespace adasgd::queue {

void QueueParams::validate() const {
  if (!(n > 0.0) || !(c0 > 0.0) || !(h0 > 0.0)) {
    throw std::invalid_argument("queue parameters n, c0 and h0 must be positive");
  }
  if (!(mu_low > 0.0 && mu_low <= mu_high) || !(p_low <= p_high)) {
    throw std::invalid_argument("queue box bounds must be ordered with mu_low > 0");
  }
  if (!(demand_rate(p_low, *this) < mu_low)) {
    throw std::invalid_argument("queue box is not uniformly stable: lambda(p_low) >= mu_low");
  }
}

BoxProjection QueueParams::box() const {
  return BoxProjection((Eigen::VectorXd(2) << mu_low, p_low).finished(),
                       (Eigen::VectorXd(2) << mu_high, p_high).finished());
}

double demand_rate(double p, const QueueParams& params) { return params.n / (1.0 + std::exp(p - params.a)); }

double demand_slope(double p, const QueueParams& params) {
  const double lambda = demand_rate(p, params);
  return -lambda * (1.0 - lambda / params.n);
}

QueueState queue_transition(const QueueState& state, const QueueTheta& theta, const QueueParams& params,
                            const QueueNoise& noise) {
  const double gap = noise.interarrival / demand_rate(theta.p, params);
  QueueState next;
  next.wait = std::max(state.wait + noise.service / theta.mu - gap, 0.0);
  next.busy = next.wait > 0.0 ? state.busy + gap : 0.0;
  return next;
}

Eigen::Vector2d queue_gradient(const QueueState& state, const QueueTheta& theta, const QueueParams& params,
                               DemandSlope slope) {
  if (!(theta.mu > 0.0)) throw std::domain_error("queue gradient requires mu > 0");
  const double lambda = demand_rate(theta.p, params);
  const double dlambda = slope == DemandSlope::Analytic ? demand_slope(theta.p, params) : 0.0;
  const double sojourn = state.wait + state.busy + 1.0 / theta.mu;
  Eigen::Vector2d g;
  g[0] = 2.0 * params.c0 * theta.mu - params.h0 * (lambda / theta.mu) * sojourn;
  g[1] = -lambda - theta.p * dlambda + params.h0 * dlambda * sojourn;
  return g;
}

double mm1_loss(const QueueTheta& theta, const QueueParams& params) {
  const double lambda = demand_rate(theta.p, params);
  if (!(lambda < theta.mu)) throw std::domain_error("unstable configuration");
  const double rho = lambda / theta.mu;
  return -(theta.p * lambda - params.c0 * theta.mu * theta.mu - params.h0 * rho / (1.0 - rho));
}

QueueEnv::QueueEnv(QueueParams params) : params_(params) { params_.validate(); }

void QueueEnv::reset(const ThetaVector& /*theta*/, Rng& /*rng*/) {
  state_ = QueueState{};
  sampler_ = ExponentialSampler{};
}

GradientSample QueueEnv::sample(const ThetaVector& theta, Rng& rng) {
  const auto point = QueueTheta::from_vector(theta);
  state_ = queue_transition(state_, point, params_, sampler_(rng));
  return queue_gradient(state_, point, params_);
}

}  // namespace adasgd::queue
