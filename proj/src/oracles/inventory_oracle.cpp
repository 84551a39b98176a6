#include "adasgd/oracles/inventory_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace adasgd::oracles {

using inventory::InventoryParams;
using inventory::InventoryState;

namespace {

void check_budget(std::uint64_t burn_in, std::uint64_t samples) {
  if (burn_in < 1000) throw std::invalid_argument("stationary loss needs a burn-in of at least 1e3 steps");
  if (samples < 100000) throw std::invalid_argument("stationary loss needs at least 1e5 samples");
}

// Advances the demand chain for a slice of grid points over the whole tape and
// accumulates the post-burn-in average loss of each.
void tabulate_slice(const InventoryParams& params, const NoiseTape& tape, std::uint64_t burn_in,
                    std::uint64_t samples, const std::vector<double>& grid, std::size_t begin, std::size_t end,
                    std::vector<double>& out) {
  const std::size_t n = end - begin;
  std::vector<double> demand(n, 0.0);
  std::vector<double> total(n, 0.0);
  std::vector<double> chunk(n, 0.0);
  const double* theta = grid.data() + begin;
  const double drift = (1.0 - params.alpha) * params.m;
  const std::uint64_t horizon = burn_in + samples;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const double u = tape[t].u;
    const double eps = tape[t].eps;
    const bool record = t >= burn_in;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::max(params.alpha * std::min(demand[j] + u, theta[j]) + drift + eps, 0.0);
      demand[j] = d;
      chunk[j] += record ? params.h * std::max(theta[j] - d, 0.0) + params.b * std::max(d - theta[j], 0.0) : 0.0;
    }
    // Flush periodically so no single sum grows large.
    if ((t + 1) % 4096 == 0 || t + 1 == horizon) {
      for (std::size_t j = 0; j < n; ++j) {
        total[j] += chunk[j];
        chunk[j] = 0.0;
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) out[begin + j] = total[j] / static_cast<double>(samples);
}

}  // namespace

NoiseTape::NoiseTape(const InventoryParams& params, std::uint64_t length, std::uint64_t seed) {
  Rng rng(seed);
  inventory::NoiseSampler sampler(params.sigma);
  noise_.reserve(length);
  for (std::uint64_t t = 0; t < length; ++t) noise_.push_back(sampler(rng));
}

Estimate mc_stationary_loss(const InventoryParams& params, double theta, std::uint64_t burn_in,
                            std::uint64_t samples, const NoiseTape& tape) {
  check_budget(burn_in, samples);
  if (tape.size() < burn_in + samples) throw std::invalid_argument("noise tape is shorter than burn-in plus samples");
  InventoryState state;
  for (std::uint64_t t = 0; t < burn_in; ++t) state = inventory::inventory_transition(state, theta, params, tape[t]);
  BatchMeans bm;
  for (std::uint64_t t = 0; t < samples; ++t) {
    state = inventory::inventory_transition(state, theta, params, tape[burn_in + t]);
    bm.add(batch_of(t, samples), inventory::inventory_loss(state.demand, theta, params));
  }
  return bm.estimate();
}

Estimate mc_stationary_loss(const InventoryParams& params, double theta, std::uint64_t burn_in,
                            std::uint64_t samples, std::uint64_t seed) {
  check_budget(burn_in, samples);
  params.validate();
  return mc_stationary_loss(params, theta, burn_in, samples, NoiseTape(params, burn_in + samples, seed));
}

Estimate mc_loss_derivative(const InventoryParams& params, double theta, double delta, std::uint64_t burn_in,
                            std::uint64_t samples, std::uint64_t seed) {
  check_budget(burn_in, samples);
  if (!(delta > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  Rng rng(seed);
  inventory::NoiseSampler sampler(params.sigma);
  InventoryState up;
  InventoryState down;
  BatchMeans bm;
  for (std::uint64_t t = 0; t < burn_in + samples; ++t) {
    const auto noise = sampler(rng);
    up = inventory::inventory_transition(up, theta + delta, params, noise);
    down = inventory::inventory_transition(down, theta - delta, params, noise);
    if (t < burn_in) continue;
    const double diff = inventory::inventory_loss(up.demand, theta + delta, params) -
                        inventory::inventory_loss(down.demand, theta - delta, params);
    bm.add(batch_of(t - burn_in, samples), diff / (2.0 * delta));
  }
  return bm.estimate();
}

StationaryLossTable::StationaryLossTable(double lower, double step, std::vector<double> values)
    : lower_(lower), step_(step), values_(std::move(values)) {
  if (!(step_ > 0.0) || values_.size() < 2) throw std::invalid_argument("loss table needs a positive step and two nodes");
}

double StationaryLossTable::operator()(double theta) const {
  const double pos = std::clamp((theta - lower_) / step_, 0.0, static_cast<double>(values_.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

StationaryLossTable build_loss_table(const InventoryParams& params, const LossTableOptions& options) {
  params.validate();
  check_budget(options.burn_in, options.samples);
  const auto nodes = static_cast<std::size_t>(std::llround(params.theta_max / options.step)) + 1;
  const double step = params.theta_max / static_cast<double>(nodes - 1);
  std::vector<double> grid(nodes);
  for (std::size_t j = 0; j < nodes; ++j) grid[j] = step * static_cast<double>(j);

  const NoiseTape tape(params, options.burn_in + options.samples, options.seed);
  std::vector<double> values(nodes, 0.0);
  const auto jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  const std::size_t per = (nodes + jobs - 1) / jobs;
  std::vector<std::thread> workers;
  for (std::size_t begin = 0; begin < nodes; begin += per) {
    const std::size_t end = std::min(nodes, begin + per);
    workers.emplace_back(
        [&, begin, end] { tabulate_slice(params, tape, options.burn_in, options.samples, grid, begin, end, values); });
  }
  for (auto& w : workers) w.join();
  return StationaryLossTable(0.0, step, std::move(values));
}

GridOptimum inventory_optimum(const StationaryLossTable& table) {
  return grid_optimum([&](double theta) { return table(theta); }, table.lower(), table.upper(), table.step());
}

}  // namespace adasgd::oracles
