#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adasgd/env/actor_critic.hpp"
#include "adasgd/harness/config.hpp"
#include "adasgd/oracles/statistics.hpp"

namespace adasgd::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Sample budgets for the stochastic checks; fast() is a scaled-down smoke budget.
struct CheckBudget {
  std::uint64_t ipa_paths = 1000;
  int ipa_horizon = 50;
  std::uint64_t inventory_samples = 1'000'000;
  std::uint64_t queue_arrivals = 10'000'000;
  std::uint64_t rl_steps = 10'000'000;
  std::uint64_t burn_in = 10'000;
  std::uint64_t seed = 42;

  static CheckBudget full() { return {}; }
  static CheckBudget fast();
};

/// Long-run statistics of the actor-critic triad at a fixed policy.
struct RlStationaryStats {
  std::vector<oracles::Estimate> visit_frequency;   ///< per (s,a), row-major
  std::vector<oracles::Estimate> critic_mean;       ///< E[Q_t(s_t,a_t) | s_t=s, a_t=a]
  std::vector<oracles::Estimate> gradient_mean;     ///< per logit
  double regeneration_fraction = 0.0;
  double max_abs_q = 0.0;
  std::uint64_t steps = 0;
};

RlStationaryStats rl_stationary_run(const rl::MdpSpec& mdp, const rl::SoftmaxPolicy& policy,
                                    const rl::ActorCriticOptions& options, std::uint64_t burn_in,
                                    std::uint64_t steps, std::uint64_t seed);

/// The seeded 3 x 2 MDP and logits used by the stationarity checks.
rl::MdpSpec check_mdp();
rl::SoftmaxPolicy check_policy(const rl::MdpSpec& mdp, std::uint64_t seed);

CheckResult check_inventory_ipa(const CheckBudget& budget);
CheckResult check_inventory_unbiased(const CheckBudget& budget);
CheckResult check_inventory_derivative_bound(const CheckBudget& budget);
CheckResult check_queue_unbiased(const CheckBudget& budget);
CheckResult check_queue_little(const CheckBudget& budget);
CheckResult check_queue_regeneration(const CheckBudget& budget);
CheckResult check_rl_occupancy(const CheckBudget& budget);
CheckResult check_rl_critic(const CheckBudget& budget);
CheckResult check_rl_unbiased(const CheckBudget& budget);
CheckResult check_rl_regeneration(const CheckBudget& budget);
CheckResult check_rl_score(const CheckBudget& budget);
CheckResult check_oracle_value_iteration(const CheckBudget& budget);
CheckResult check_oracle_pg(const CheckBudget& budget);
CheckResult check_oracle_occupancy(const CheckBudget& budget);

/// All checks, or those of one environment (oracle checks belong to rl and queue).
std::vector<CheckResult> run_checks(std::optional<EnvKind> env, const CheckBudget& budget);

}  // namespace adasgd::harness
