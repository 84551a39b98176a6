#pragma once

#include "adasgd/core/types.hpp"

namespace adasgd::inventory {

/// Base-stock inventory with stock-out damped AR(1) demand.
struct InventoryParams {
  double alpha = 0.8;       ///< AR coefficient, in (0, 1)
  double m = 5.0;           ///< demand drift
  double sigma = 1.0;       ///< std of both noise terms u and eps
  double h = 1.0;           ///< overage cost per unit
  double b = 10.0;          ///< underage cost per unit
  double theta_max = 20.0;  ///< Theta = [0, theta_max]

  void validate() const;
  bool operator==(const InventoryParams&) const = default;
};

/// Demand D and its pathwise derivative L = dD/dtheta.
struct InventoryState {
  double demand = 0.0;
  double derivative = 0.0;
};

struct InventoryNoise {
  double u = 0.0;
  double eps = 0.0;
};

/// D' = (alpha min{D+u, theta} + (1-alpha) m + eps)^+
/// L' = 1{D'>0} alpha (1{D+u>theta} + 1{D+u<=theta} L)
InventoryState inventory_transition(const InventoryState& state, double theta, const InventoryParams& params,
                                    const InventoryNoise& noise);

/// (h 1{D<theta} - b 1{D>=theta}) (1 - L)
double inventory_gradient(const InventoryState& state, double theta, const InventoryParams& params);

/// h (theta - D)^+ + b (D - theta)^+
double inventory_loss(double demand, double theta, const InventoryParams& params);

/// Draws (u, eps) i.i.d. N(0, sigma^2).
class NoiseSampler {
 public:
  explicit NoiseSampler(double sigma) : normal_(0.0, sigma) {}
  InventoryNoise operator()(Rng& rng) {
    InventoryNoise noise;
    noise.u = normal_(rng);
    noise.eps = normal_(rng);
    return noise;
  }

 private:
  std::normal_distribution<double> normal_;
};

/// Adaptive environment for the SGD driver. Starts at the atom D = 0, L = 0.
class InventoryEnv {
 public:
  explicit InventoryEnv(InventoryParams params);

  Eigen::Index dimension() const { return 1; }
  void reset(const ThetaVector& theta, Rng& rng);
  GradientSample sample(const ThetaVector& theta, Rng& rng);

  const InventoryState& state() const { return state_; }
  const InventoryParams& params() const { return params_; }

 private:
  InventoryParams params_;
  NoiseSampler noise_;
  InventoryState state_;
};

}  // namespace adasgd::inventory
