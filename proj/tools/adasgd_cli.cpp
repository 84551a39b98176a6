#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "adasgd/harness/checks.hpp"
#include "adasgd/harness/config.hpp"
#include "adasgd/harness/experiment.hpp"
#include "adasgd/harness/report.hpp"

namespace {

using namespace adasgd;
using namespace adasgd::harness;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfigError = 2;

struct Flags {
  std::string preset;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool allow_boundary = false;
  bool fast = false;
  std::string env;
};

std::vector<ExperimentConfig> resolve_experiments(const Flags& flags) {
  if (!flags.preset.empty() && !flags.config.empty()) throw ConfigError("give either --preset or --config, not both");
  if (!flags.config.empty()) return load_experiments(flags.config);
  if (!flags.preset.empty()) return find_preset(flags.preset).experiments;
  throw ConfigError("one of --preset or --config is required");
}

RunOptions run_options(const Flags& flags, const std::string& out) {
  RunOptions options;
  options.jobs = flags.jobs;
  options.allow_boundary = flags.allow_boundary;
  options.cache_root = out;
  options.log = &std::cerr;
  if (flags.fast) options.loss_table.samples = 200'000;
  return options;
}

int cmd_run(const Flags& flags) {
  auto experiments = resolve_experiments(flags);
  for (auto& cfg : experiments) {
    if (!flags.out.empty()) cfg.out = flags.out;
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.fast) cfg.replications = std::min<std::uint64_t>(cfg.replications, 10);
    cfg.validate();
  }
  for (const auto& cfg : experiments) {
    const auto result = run_experiment(cfg, run_options(flags, cfg.out));
    const auto files = write_outputs(result, cfg.out);
    std::cout << fit_summary(result) << "wrote " << files.csv.string() << " and " << files.svg.string() << '\n';
  }
  return kOk;
}

int cmd_oracle(const Flags& flags) {
  std::optional<EnvKind> env;
  if (!flags.env.empty()) env = parse_env_kind(flags.env);
  std::vector<ExperimentConfig> experiments;
  if (!flags.preset.empty() || !flags.config.empty()) {
    experiments = resolve_experiments(flags);
  } else if (env) {
    for (const auto& p : presets()) {
      if (p.experiments.front().env == *env) {
        experiments = p.experiments;
        break;
      }
    }
  } else {
    throw ConfigError("oracle needs --env, --preset or --config");
  }
  const ExperimentConfig& cfg = experiments.front();
  if (env && cfg.env != *env) throw ConfigError("--env does not match the environment of the chosen experiment");
  const std::string out = flags.out.empty() ? cfg.out : flags.out;
  const auto options = run_options(flags, out);
  char buf[256];
  switch (cfg.env) {
    case EnvKind::Inventory: {
      const auto o = inventory_oracle(cfg.inventory, options);
      std::snprintf(buf, sizeof buf, "inventory alpha=%.3g: theta* = %.6f, loss* = %.8f", cfg.inventory.alpha,
                    o.theta_star, o.loss_star);
      std::cout << buf << '\n';
      if (o.on_boundary) std::cout << "warning: " << o.diagnostic << '\n';
      break;
    }
    case EnvKind::Queue: {
      const auto o = queue_oracle(cfg.queue, options);
      std::snprintf(buf, sizeof buf, "queue: mu* = %.6f, p* = %.6f, loss* = %.8f", o.theta_star[0], o.theta_star[1],
                    o.loss_star);
      std::cout << buf << '\n';
      if (o.on_boundary) std::cout << "warning: " << o.diagnostic << '\n';
      break;
    }
    case EnvKind::Rl: {
      const auto instances = rl_instances(cfg.rl, cfg.replications, options);
      double lo = instances.front().loss_star;
      double hi = lo;
      for (const auto& inst : instances) {
        lo = std::min(lo, inst.loss_star);
        hi = std::max(hi, inst.loss_star);
      }
      std::snprintf(buf, sizeof buf, "rl %dx%d: %zu instances, optimal loss in [%.6f, %.6f]", cfg.rl.states,
                    cfg.rl.actions, instances.size(), lo, hi);
      std::cout << buf << '\n';
      break;
    }
  }
  std::cout << "cached under " << (std::filesystem::path(out) / "oracle-cache").string() << '\n';
  return kOk;
}

int cmd_check(const Flags& flags) {
  std::optional<EnvKind> env;
  if (!flags.env.empty()) env = parse_env_kind(flags.env);
  CheckBudget budget = flags.fast ? CheckBudget::fast() : CheckBudget::full();
  if (flags.seed) budget.seed = *flags.seed;
  bool ok = true;
  for (const auto& r : run_checks(env, budget)) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  [" << r.detail << "]\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kFailed;
}

int cmd_list(const Flags& flags) {
  if (!flags.preset.empty()) {
    std::cout << to_document(find_preset(flags.preset).experiments).dump(2) << '\n';
    return kOk;
  }
  for (const auto& p : presets()) {
    std::cout << p.name << "  " << p.description << '\n';
    for (const auto& e : p.experiments) std::cout << "    " << e.id << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SGD with adaptively generated Markovian data: experiments, oracles and checks"};
  app.require_subcommand(1);
  Flags flags;

  auto* run = app.add_subcommand("run", "run an experiment from a preset or config file");
  run->add_option("--preset", flags.preset, "bundled preset name");
  run->add_option("--config", flags.config, "experiment JSON file");
  run->add_option("--out", flags.out, "output directory (overrides the config)");
  run->add_option("--seed", flags.seed, "base seed (overrides the config)");
  run->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--allow-boundary", flags.allow_boundary, "accept oracle optima on the boundary");
  run->add_flag("--fast", flags.fast, "at most 10 replications and a smaller loss table");

  auto* oracle = app.add_subcommand("oracle", "compute and cache an environment's optimum");
  oracle->add_option("--env", flags.env, "inventory, queue or rl");
  oracle->add_option("--preset", flags.preset, "bundled preset name");
  oracle->add_option("--config", flags.config, "experiment JSON file");
  oracle->add_option("--out", flags.out, "cache root directory");
  oracle->add_flag("--fast", flags.fast, "smaller loss table");

  auto* check = app.add_subcommand("check", "run the property and invariant suite");
  check->add_option("--env", flags.env, "restrict to inventory, queue or rl");
  check->add_option("--seed", flags.seed, "base seed");
  check->add_flag("--fast", flags.fast, "scaled-down sample budgets");

  auto* list = app.add_subcommand("list-presets", "list bundled presets");
  list->add_option("--preset", flags.preset, "print this preset as an editable JSON document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(flags);
    if (oracle->parsed()) return cmd_oracle(flags);
    if (check->parsed()) return cmd_check(flags);
    if (list->parsed()) return cmd_list(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kConfigError;
}
