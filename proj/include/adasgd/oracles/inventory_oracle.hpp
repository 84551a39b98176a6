#pragma once

#include <cstdint>
#include <vector>

#include "adasgd/env/inventory.hpp"
#include "adasgd/oracles/optimize.hpp"
#include "adasgd/oracles/statistics.hpp"

namespace adasgd::oracles {

/// A fixed realization of the (u, eps) noise, shared across parameter values
/// so that losses at different theta use common random numbers.
class NoiseTape {
 public:
  NoiseTape(const inventory::InventoryParams& params, std::uint64_t length, std::uint64_t seed);

  std::uint64_t size() const { return noise_.size(); }
  const inventory::InventoryNoise& operator[](std::uint64_t t) const { return noise_[t]; }

 private:
  std::vector<inventory::InventoryNoise> noise_;
};

/// Time average of inventory_loss(D_t, theta) after burn_in steps from D = 0,
/// with a 50-batch batch-means standard error. Needs burn_in >= 1e3, samples >= 1e5.
Estimate mc_stationary_loss(const inventory::InventoryParams& params, double theta, std::uint64_t burn_in,
                            std::uint64_t samples, std::uint64_t seed);

/// Same estimator on a caller-provided tape of at least burn_in + samples steps.
Estimate mc_stationary_loss(const inventory::InventoryParams& params, double theta, std::uint64_t burn_in,
                            std::uint64_t samples, const NoiseTape& tape);

/// Central difference (l(theta + delta) - l(theta - delta)) / (2 delta) of the
/// stationary loss, both sides driven by the same noise.
Estimate mc_loss_derivative(const inventory::InventoryParams& params, double theta, double delta,
                            std::uint64_t burn_in, std::uint64_t samples, std::uint64_t seed);

/// Stationary loss tabulated on a uniform grid over [0, theta_max] with common
/// random numbers, linearly interpolated in between.
class StationaryLossTable {
 public:
  StationaryLossTable(double lower, double step, std::vector<double> values);

  /// Interpolated loss; arguments outside the grid are clamped to it.
  double operator()(double theta) const;

  double lower() const { return lower_; }
  double step() const { return step_; }
  double upper() const { return lower_ + step_ * static_cast<double>(values_.size() - 1); }
  const std::vector<double>& values() const { return values_; }

 private:
  double lower_;
  double step_;
  std::vector<double> values_;
};

struct LossTableOptions {
  double step = 0.01;
  std::uint64_t burn_in = 10'000;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 20240601;
  int jobs = 1;
};

StationaryLossTable build_loss_table(const inventory::InventoryParams& params, const LossTableOptions& options);

/// Minimizer of the tabulated loss over [0, theta_max].
GridOptimum inventory_optimum(const StationaryLossTable& table);

}  // namespace adasgd::oracles
