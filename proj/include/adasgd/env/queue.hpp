#pragma once

#include "adasgd/core/projection.hpp"
#include "adasgd/core/types.hpp"

namespace adasgd::queue {

/// Single-server queue with logistic price-driven demand and quadratic capacity cost.
///
/// Arrival rate lambda(p) = n * exp(a - p) / (1 + exp(a - p)); capacity cost
/// c(mu) = c0 mu^2; holding cost h0 per customer per unit time.
/// Theta = [mu_low, mu_high] x [p_low, p_high], stored in the order (mu, p).
struct QueueParams {
  double n = 10.0;
  double a = 4.1;
  double c0 = 0.1;
  double h0 = 1.0;
  double mu_low = 6.5;
  double mu_high = 12.0;
  double p_low = 3.8;
  double p_high = 8.0;

  /// Requires positive n, c0, h0, ordered bounds and lambda(p_low) < mu_low.
  void validate() const;
  BoxProjection box() const;
  bool operator==(const QueueParams&) const = default;
};

/// Waiting time W of the current customer and the server busy time X it observes.
struct QueueState {
  double wait = 0.0;
  double busy = 0.0;
};

struct QueueTheta {
  double mu = 1.0;
  double p = 0.0;

  static QueueTheta from_vector(const ThetaVector& theta) { return {theta[0], theta[1]}; }
  ThetaVector to_vector() const { return (ThetaVector(2) << mu, p).finished(); }
};

/// Baseline (unit-rate) service and interarrival variates.
struct QueueNoise {
  double service = 0.0;
  double interarrival = 0.0;
};

/// Whether queue_gradient uses the analytic demand slope or treats it as zero.
enum class DemandSlope { Analytic, Frozen };

double demand_rate(double p, const QueueParams& params);
/// d lambda / dp = -lambda(p) (1 - lambda(p) / n).
double demand_slope(double p, const QueueParams& params);

/// W' = (W + S/mu - T/lambda(p))^+,  X' = (X + T/lambda(p)) 1{W' > 0}.
QueueState queue_transition(const QueueState& state, const QueueTheta& theta, const QueueParams& params,
                            const QueueNoise& noise);

/// IPA gradient (d/dmu, d/dp) built on the busy-time augmented chain:
///   g_p  = -lambda - p lambda' + h0 lambda' (W + X + 1/mu)
///   g_mu = 2 c0 mu - h0 (lambda / mu) (W + X + 1/mu)
/// Throws std::domain_error if mu <= 0.
Eigen::Vector2d queue_gradient(const QueueState& state, const QueueTheta& theta, const QueueParams& params,
                               DemandSlope slope = DemandSlope::Analytic);

/// Minimization objective of the M/M/1 pricing and capacity problem:
///   -[ p lambda(p) - c0 mu^2 - h0 rho / (1 - rho) ],  rho = lambda(p) / mu.
/// Throws std::domain_error("unstable configuration") when lambda(p) >= mu.
double mm1_loss(const QueueTheta& theta, const QueueParams& params);

/// Exp(1) baseline variates for the M/M/1 specialization.
class ExponentialSampler {
 public:
  QueueNoise operator()(Rng& rng) {
    QueueNoise noise;
    noise.service = exp_(rng);
    noise.interarrival = exp_(rng);
    return noise;
  }

 private:
  std::exponential_distribution<double> exp_{1.0};
};

/// Adaptive environment for the SGD driver. Starts empty (W = X = 0).
class QueueEnv {
 public:
  explicit QueueEnv(QueueParams params);

  Eigen::Index dimension() const { return 2; }
  void reset(const ThetaVector& theta, Rng& rng);
  GradientSample sample(const ThetaVector& theta, Rng& rng);

  const QueueState& state() const { return state_; }

 private:
  QueueParams params_;
  ExponentialSampler sampler_;
  QueueState state_;
};

}  // namespace adasgd::queue
