#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adasgd/core/step_schedule.hpp"
#include "adasgd/core/types.hpp"
#include "adasgd/env/actor_critic.hpp"
#include "adasgd/env/inventory.hpp"
#include "adasgd/env/queue.hpp"

namespace adasgd::harness {

enum class EnvKind { Inventory, Queue, Rl };

std::string_view to_string(EnvKind kind);
EnvKind parse_env_kind(std::string_view name);

/// Random tabular MDPs, one instance per replication.
struct RlParams {
  int states = 5;
  int actions = 5;
  double gamma = 0.8;
  double alpha = 0.5;
  std::uint64_t mdp_seed = 7;
  rl::CriticTarget critic_target = rl::CriticTarget::Transition;

  bool operator==(const RlParams&) const = default;
};

/// Thrown for malformed or inconsistent experiment configurations.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string id;
  EnvKind env = EnvKind::Inventory;
  inventory::InventoryParams inventory;
  queue::QueueParams queue;
  RlParams rl;
  ScheduleFamily schedule = ScheduleFamily::InverseSqrt;
  double eta0 = 1.0;
  bool scale_by_batch = true;  ///< eta_k = eta0 * B * f(k)
  bool step_by_samples = false;  ///< f(kB) instead of f(k)
  std::vector<std::uint64_t> batches{1, 10, 100};
  std::uint64_t horizon = 10'000;
  std::uint64_t replications = 100;
  bool averaging = false;
  bool projection = true;
  std::uint64_t seed = 1;
  int checkpoints_per_decade = 32;
  double reference_slope = -1.0;
  std::optional<std::vector<double>> theta0;  ///< default: the environment's canonical start
  std::string out = "results";

  /// Throws ConfigError.
  void validate() const;
  StepSchedule schedule_for(std::uint64_t batch) const;
  ThetaVector initial_theta() const;
  bool operator==(const ExperimentConfig&) const = default;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

/// A named group of experiments (one figure panel each).
struct Preset {
  std::string name;
  std::string description;
  std::vector<ExperimentConfig> experiments;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for an unknown name.
const Preset& find_preset(std::string_view name);

/// Parses either a single experiment object or {"experiments": [...]}.
std::vector<ExperimentConfig> parse_experiments(const nlohmann::json& doc);
std::vector<ExperimentConfig> load_experiments(const std::string& path);
nlohmann::json to_document(const std::vector<ExperimentConfig>& experiments);

}  // namespace adasgd::harness
