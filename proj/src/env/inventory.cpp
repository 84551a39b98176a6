#include "adasgd/env/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adasgd::inventory {

void InventoryParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("inventory alpha must lie in (0, 1)");
  if (!(m >= 0.0)) throw std::invalid_argument("inventory drift m must be non-negative");
  if (!(sigma > 0.0)) throw std::invalid_argument("inventory sigma must be positive");
  if (!(h > 0.0) || !(b > 0.0)) throw std::invalid_argument("inventory costs h and b must be positive");
  if (!(theta_max > 0.0)) throw std::invalid_argument("inventory theta_max must be positive");
}

InventoryState inventory_transition(const InventoryState& state, double theta, const InventoryParams& params,
                                    const InventoryNoise& noise) {
  const double pre = state.demand + noise.u;
  const bool stock_out = pre > theta;  // ties go to the non-stock-out branch
  const double raw = params.alpha * std::min(pre, theta) + (1.0 - params.alpha) * params.m + noise.eps;
  InventoryState next;
  next.demand = std::max(raw, 0.0);
  next.derivative = next.demand > 0.0 ? params.alpha * (stock_out ? 1.0 : state.derivative) : 0.0;
  return next;
}

double inventory_gradient(const InventoryState& state, double theta, const InventoryParams& params) {
  const double slope = state.demand < theta ? params.h : -params.b;
  return slope * (1.0 - state.derivative);
}

double inventory_loss(double demand, double theta, const InventoryParams& params) {
  return params.h * std::max(theta - demand, 0.0) + params.b * std::max(demand - theta, 0.0);
}

InventoryEnv::InventoryEnv(InventoryParams params) : params_(params), noise_(params.sigma) { params_.validate(); }

void InventoryEnv::reset(const ThetaVector& /*theta*/, Rng& /*rng*/) {
  state_ = InventoryState{};
  noise_ = NoiseSampler(params_.sigma);
}

GradientSample InventoryEnv::sample(const ThetaVector& theta, Rng& rng) {
  const double level = theta[0];
  state_ = inventory_transition(state_, level, params_, noise_(rng));
  GradientSample g(1);
  g[0] = inventory_gradient(state_, level, params_);
  return g;
}

}  // namespace adasgd::inventory
