#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adasgd/env/mdp.hpp"
#include "adasgd/harness/config.hpp"
#include "adasgd/oracles/inventory_oracle.hpp"
#include "adasgd/oracles/statistics.hpp"

namespace adasgd::harness {

/// Raised when the oracle optimum sits on the boundary of Theta and the caller did not allow it.
struct BoundaryError : ConfigError {
  using ConfigError::ConfigError;
};

struct RunOptions {
  int jobs = 1;
  bool allow_boundary = false;
  std::optional<std::filesystem::path> cache_root;  ///< enables the oracle cache under <root>/oracle-cache
  std::ostream* log = nullptr;
  oracles::LossTableOptions loss_table;  ///< Monte-Carlo budget of the inventory loss table
};

/// round(10^(k / per_decade)) for k = 0, 1, ... below horizon, deduplicated, plus horizon itself.
std::vector<std::uint64_t> log_checkpoints(std::uint64_t horizon, int per_decade);

struct InventoryOracle {
  oracles::StationaryLossTable table;
  double theta_star = 0.0;
  double loss_star = 0.0;
  bool on_boundary = false;
  std::string diagnostic;
};

struct QueueOracle {
  Eigen::Vector2d theta_star;
  double loss_star = 0.0;
  bool on_boundary = false;
  std::string diagnostic;
};

struct RlInstance {
  std::shared_ptr<const rl::MdpSpec> mdp;
  double loss_star = 0.0;
};

InventoryOracle inventory_oracle(const inventory::InventoryParams& params, const RunOptions& options);
QueueOracle queue_oracle(const queue::QueueParams& params, const RunOptions& options);
/// Instance r is random_mdp(states, actions, gamma, derive_seed(mdp_seed, r)).
std::vector<RlInstance> rl_instances(const RlParams& params, std::uint64_t count, const RunOptions& options);

struct BatchResult {
  std::uint64_t batch = 1;
  oracles::LossCurve curve;
  std::vector<std::uint64_t> contributing;  ///< finite gaps per checkpoint
  std::vector<std::uint64_t> diverged;      ///< replications diverged or with non-finite gap per checkpoint
  std::vector<std::vector<double>> gaps;    ///< [replication][checkpoint]
  std::optional<oracles::RateFit> fit;
  std::string fit_error;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::uint64_t> checkpoints;
  std::vector<BatchResult> batches;
};

/// Runs every (batch, replication) cell on a pool of options.jobs workers.
/// Replication r uses seed derive_seed(config.seed, r) for every batch size.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace adasgd::harness
