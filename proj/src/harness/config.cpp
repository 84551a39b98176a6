#include "adasgd/harness/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace adasgd::harness {

using nlohmann::json;

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::Inventory:
      return "inventory";
    case EnvKind::Queue:
      return "queue";
    case EnvKind::Rl:
      return "rl";
  }
  return "unknown";
}

EnvKind parse_env_kind(std::string_view name) {
  if (name == "inventory") return EnvKind::Inventory;
  if (name == "queue") return EnvKind::Queue;
  if (name == "rl") return EnvKind::Rl;
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

json params_json(const ExperimentConfig& cfg) {
  switch (cfg.env) {
    case EnvKind::Inventory: {
      const auto& p = cfg.inventory;
      return {{"alpha", p.alpha}, {"m", p.m}, {"sigma", p.sigma}, {"h", p.h}, {"b", p.b}, {"theta_max", p.theta_max}};
    }
    case EnvKind::Queue: {
      const auto& p = cfg.queue;
      return {{"n", p.n},           {"a", p.a},           {"c0", p.c0},       {"h0", p.h0},
              {"mu_low", p.mu_low}, {"mu_high", p.mu_high}, {"p_low", p.p_low}, {"p_high", p.p_high}};
    }
    case EnvKind::Rl: {
      const auto& p = cfg.rl;
      return {{"states", p.states},     {"actions", p.actions}, {"gamma", p.gamma},
              {"alpha", p.alpha},       {"mdp_seed", p.mdp_seed},
              {"critic_target", std::string(rl::to_string(p.critic_target))}};
    }
  }
  return json::object();
}

void read_params(const json& j, ExperimentConfig& cfg) {
  switch (cfg.env) {
    case EnvKind::Inventory: {
      reject_unknown(j, {"alpha", "m", "sigma", "h", "b", "theta_max"}, "inventory params");
      auto& p = cfg.inventory;
      p.alpha = j.value("alpha", p.alpha);
      p.m = j.value("m", p.m);
      p.sigma = j.value("sigma", p.sigma);
      p.h = j.value("h", p.h);
      p.b = j.value("b", p.b);
      p.theta_max = j.value("theta_max", p.theta_max);
      break;
    }
    case EnvKind::Queue: {
      reject_unknown(j, {"n", "a", "c0", "h0", "mu_low", "mu_high", "p_low", "p_high"}, "queue params");
      auto& p = cfg.queue;
      p.n = j.value("n", p.n);
      p.a = j.value("a", p.a);
      p.c0 = j.value("c0", p.c0);
      p.h0 = j.value("h0", p.h0);
      p.mu_low = j.value("mu_low", p.mu_low);
      p.mu_high = j.value("mu_high", p.mu_high);
      p.p_low = j.value("p_low", p.p_low);
      p.p_high = j.value("p_high", p.p_high);
      break;
    }
    case EnvKind::Rl: {
      reject_unknown(j, {"states", "actions", "gamma", "alpha", "mdp_seed", "critic_target"}, "rl params");
      auto& p = cfg.rl;
      p.states = j.value("states", p.states);
      p.actions = j.value("actions", p.actions);
      p.gamma = j.value("gamma", p.gamma);
      p.alpha = j.value("alpha", p.alpha);
      p.mdp_seed = j.value("mdp_seed", p.mdp_seed);
      if (j.contains("critic_target")) {
        try {
          p.critic_target = rl::parse_critic_target(j.at("critic_target").get<std::string>());
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      break;
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (id.empty()) throw ConfigError("experiment id must not be empty");
  if (batches.empty()) throw ConfigError("experiment needs at least one batch size");
  if (std::set<std::uint64_t>(batches.begin(), batches.end()).size() != batches.size()) {
    throw ConfigError("batch sizes must be distinct");
  }
  for (auto b : batches) {
    if (b == 0) throw ConfigError("batch sizes must be positive");
    if (b > horizon) throw ConfigError("horizon must be at least every batch size");
  }
  if (replications == 0) throw ConfigError("replications must be positive");
  if (checkpoints_per_decade < 1 || checkpoints_per_decade > 64) {
    throw ConfigError("checkpoints_per_decade must lie in [1, 64]");
  }
  if (!(eta0 > 0.0)) throw ConfigError("eta0 must be positive");
  try {
    switch (env) {
      case EnvKind::Inventory:
        inventory.validate();
        break;
      case EnvKind::Queue:
        queue.validate();
        break;
      case EnvKind::Rl:
        if (rl.states < 1 || rl.actions < 1) throw ConfigError("rl needs positive states and actions");
        if (!(rl.gamma > 0.0 && rl.gamma < 1.0)) throw ConfigError("rl gamma must lie in (0, 1)");
        if (!(rl.alpha >= 0.0 && rl.alpha < 1.0)) throw ConfigError("rl alpha must lie in [0, 1)");
        if (projection) throw ConfigError("the rl environment is unconstrained; set projection to false");
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (theta0 && static_cast<Eigen::Index>(theta0->size()) != initial_theta().size()) {
    throw ConfigError("theta0 has the wrong dimension");
  }
}

StepSchedule ExperimentConfig::schedule_for(std::uint64_t batch) const {
  StepSchedule s;
  s.family = schedule;
  s.eta0 = eta0;
  s.batch_scale = scale_by_batch ? static_cast<double>(batch) : 1.0;
  return s;
}

ThetaVector ExperimentConfig::initial_theta() const {
  if (theta0) return Eigen::Map<const ThetaVector>(theta0->data(), static_cast<Eigen::Index>(theta0->size()));
  switch (env) {
    case EnvKind::Inventory:
      return ThetaVector::Constant(1, inventory.theta_max / 2.0);
    case EnvKind::Queue:
      return (ThetaVector(2) << (queue.mu_low + queue.mu_high) / 2.0, (queue.p_low + queue.p_high) / 2.0).finished();
    case EnvKind::Rl:
      return ThetaVector::Zero(static_cast<Eigen::Index>(rl.states) * rl.actions);
  }
  return {};
}

void to_json(json& j, const ExperimentConfig& cfg) {
  j = json{{"id", cfg.id},
           {"env", std::string(to_string(cfg.env))},
           {"params", params_json(cfg)},
           {"schedule", {{"family", std::string(to_string(cfg.schedule))}, {"eta0", cfg.eta0}, {"scale_by_batch", cfg.scale_by_batch},
                         {"step_by_samples", cfg.step_by_samples}}},
           {"batches", cfg.batches},
           {"horizon", cfg.horizon},
           {"replications", cfg.replications},
           {"averaging", cfg.averaging},
           {"projection", cfg.projection},
           {"seed", cfg.seed},
           {"checkpoints_per_decade", cfg.checkpoints_per_decade},
           {"reference_slope", cfg.reference_slope},
           {"out", cfg.out}};
  if (cfg.theta0) j["theta0"] = *cfg.theta0;
}

void from_json(const json& j, ExperimentConfig& cfg) {
  try {
    reject_unknown(j,
                   {"id", "env", "params", "schedule", "batches", "horizon", "replications", "averaging", "projection",
                    "seed", "checkpoints_per_decade", "reference_slope", "theta0", "out"},
                   "experiment");
    cfg = ExperimentConfig{};
    cfg.id = j.at("id").get<std::string>();
    cfg.env = parse_env_kind(j.at("env").get<std::string>());
    if (cfg.env == EnvKind::Rl) cfg.projection = false;
    if (j.contains("params")) read_params(j.at("params"), cfg);
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      reject_unknown(s, {"family", "eta0", "scale_by_batch", "step_by_samples"}, "schedule");
      if (s.contains("family")) {
        try {
          cfg.schedule = parse_schedule_family(s.at("family").get<std::string>());
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      cfg.eta0 = s.value("eta0", cfg.eta0);
      cfg.scale_by_batch = s.value("scale_by_batch", cfg.scale_by_batch);
      cfg.step_by_samples = s.value("step_by_samples", cfg.step_by_samples);
    }
    cfg.batches = j.value("batches", cfg.batches);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.replications = j.value("replications", cfg.replications);
    cfg.averaging = j.value("averaging", cfg.averaging);
    cfg.projection = j.value("projection", cfg.projection);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.checkpoints_per_decade = j.value("checkpoints_per_decade", cfg.checkpoints_per_decade);
    cfg.reference_slope = j.value("reference_slope", cfg.reference_slope);
    cfg.out = j.value("out", cfg.out);
    if (j.contains("theta0")) cfg.theta0 = j.at("theta0").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment: ") + e.what());
  }
}

namespace {

ExperimentConfig inventory_experiment(double alpha, bool averaged) {
  ExperimentConfig cfg;
  char id[64];
  std::snprintf(id, sizeof id, "inventory-%.1f-%s", alpha, averaged ? "sqrt-avg" : "t");
  cfg.id = id;
  cfg.env = EnvKind::Inventory;
  cfg.inventory.alpha = alpha;
  cfg.schedule = averaged ? ScheduleFamily::InverseSqrt : ScheduleFamily::InverseT;
  cfg.eta0 = 2.0;
  cfg.horizon = 10'000;
  cfg.averaging = averaged;
  cfg.reference_slope = -1.0;
  return cfg;
}

ExperimentConfig queue_experiment(std::string id, bool averaged, bool projected) {
  ExperimentConfig cfg;
  cfg.id = std::move(id);
  cfg.env = EnvKind::Queue;
  cfg.schedule = averaged || !projected ? ScheduleFamily::InverseSqrt : ScheduleFamily::InverseT;
  cfg.eta0 = 1.0;
  cfg.scale_by_batch = false;
  cfg.horizon = 100'000;
  cfg.averaging = averaged;
  cfg.projection = projected;
  cfg.reference_slope = cfg.schedule == ScheduleFamily::InverseT ? -1.0 : -0.5;
  return cfg;
}

ExperimentConfig rl_experiment(int size) {
  ExperimentConfig cfg;
  cfg.id = "rl-" + std::to_string(size) + "x" + std::to_string(size);
  cfg.env = EnvKind::Rl;
  cfg.rl.states = size;
  cfg.rl.actions = size;
  cfg.schedule = ScheduleFamily::InverseSqrt;
  cfg.eta0 = 2.0;
  cfg.horizon = 100'000;
  cfg.averaging = true;
  cfg.projection = false;
  cfg.reference_slope = -0.5;
  return cfg;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  for (double alpha : {0.8, 0.9}) {
    char name[32];
    std::snprintf(name, sizeof name, "inventory-%.1f", alpha);
    out.push_back({name, "inventory, eta=2B/t last iterate and eta=2B/sqrt(t) averaged",
                   {inventory_experiment(alpha, false), inventory_experiment(alpha, true)}});
  }
  out.push_back({"queue-mm1", "M/M/1 pricing and capacity, projected: eta=1/t last iterate and eta=1/sqrt(t) averaged",
                 {queue_experiment("queue-mm1-t", false, true), queue_experiment("queue-mm1-sqrt-avg", true, true)}});
  out.push_back({"queue-unprojected", "M/M/1 without projection, eta=1/sqrt(t) with and without averaging",
                 {queue_experiment("queue-unprojected-sqrt", false, false),
                  queue_experiment("queue-unprojected-sqrt-avg", true, false)}});
  out.push_back({"rl-5x5", "actor-critic on 100 random 5x5 MDPs, eta=2B/sqrt(t) averaged", {rl_experiment(5)}});
  out.push_back({"rl-10x10", "actor-critic on 100 random 10x10 MDPs, eta=2B/sqrt(t) averaged", {rl_experiment(10)}});
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<ExperimentConfig> parse_experiments(const json& doc) {
  std::vector<ExperimentConfig> out;
  if (doc.is_object() && doc.contains("experiments")) {
    reject_unknown(doc, {"experiments", "name"}, "experiment document");
    for (const auto& e : doc.at("experiments")) out.push_back(e.get<ExperimentConfig>());
  } else {
    out.push_back(doc.get<ExperimentConfig>());
  }
  if (out.empty()) throw ConfigError("experiment document is empty");
  for (const auto& cfg : out) cfg.validate();
  return out;
}

std::vector<ExperimentConfig> load_experiments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiments(doc);
}

json to_document(const std::vector<ExperimentConfig>& experiments) {
  return json{{"experiments", experiments}};
}

}  // namespace adasgd::harness
