#include "adasgd/harness/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "adasgd/core/sgd.hpp"
#include "adasgd/env/actor_critic.hpp"
#include "adasgd/oracles/cache.hpp"
#include "adasgd/oracles/mdp_oracle.hpp"
#include "adasgd/oracles/queue_oracle.hpp"

namespace adasgd::harness {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<oracles::OracleCache> cache_for(const RunOptions& options) {
  if (!options.cache_root) return std::nullopt;
  return oracles::OracleCache(*options.cache_root);
}

void log_line(const RunOptions& options, const std::string& line) {
  if (options.log != nullptr) *options.log << line << '\n';
}

json inventory_key(const inventory::InventoryParams& p, const oracles::LossTableOptions& t) {
  return {{"alpha", p.alpha}, {"m", p.m},           {"sigma", p.sigma},     {"h", p.h},
          {"b", p.b},         {"theta_max", p.theta_max}, {"step", t.step}, {"burn_in", t.burn_in},
          {"samples", t.samples}, {"seed", t.seed}};
}

json queue_key(const queue::QueueParams& p) {
  return {{"n", p.n},           {"a", p.a},           {"c0", p.c0},       {"h0", p.h0},
          {"mu_low", p.mu_low}, {"mu_high", p.mu_high}, {"p_low", p.p_low}, {"p_high", p.p_high}};
}

// Runs fn(task) for task in [0, count) on `jobs` threads; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= count) return;
      try {
        fn(task);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, jobs));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < std::min(n, count); ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

struct ReplicationTrace {
  std::vector<double> gaps;
  std::optional<std::uint64_t> divergence_sample;
};

template <class Env, class GapFn>
ReplicationTrace run_replication(Env& env, const ExperimentConfig& cfg, std::uint64_t batch, std::uint64_t r,
                                 const std::optional<BoxProjection>& box, const std::vector<std::uint64_t>& checkpoints,
                                 GapFn gap) {
  RunConfig rc;
  rc.horizon = cfg.horizon;
  rc.batch = batch;
  rc.seed = derive_seed(cfg.seed, r);
  rc.projection = box;
  rc.step_by_samples = cfg.step_by_samples;
  rc.averaging = cfg.averaging;
  const RunRecord record = run_sgd(env, rc, cfg.schedule_for(batch), cfg.initial_theta(), checkpoints);
  ReplicationTrace trace;
  trace.divergence_sample = record.divergence_sample;
  trace.gaps.reserve(record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    const ThetaVector& theta = cfg.averaging ? record.theta_bar[i] : record.theta[i];
    trace.gaps.push_back(theta.allFinite() ? gap(theta, r) : kInf);
  }
  return trace;
}

void aggregate(BatchResult& out, const std::vector<ReplicationTrace>& traces, const std::vector<std::uint64_t>& marks) {
  const std::size_t n = marks.size();
  out.curve.sample_counts = marks;
  out.curve.mean_gap.assign(n, 0.0);
  out.curve.stderr_.assign(n, 0.0);
  out.contributing.assign(n, 0);
  out.diverged.assign(n, 0);
  out.gaps.clear();
  for (const auto& t : traces) out.gaps.push_back(t.gaps);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    double sumsq = 0.0;
    std::uint64_t k = 0;
    for (const auto& t : traces) {
      const double g = t.gaps[i];
      const bool diverged = t.divergence_sample && *t.divergence_sample <= marks[i];
      if (diverged || !std::isfinite(g)) ++out.diverged[i];
      if (!std::isfinite(g)) continue;
      sum += g;
      sumsq += g * g;
      ++k;
    }
    out.contributing[i] = k;
    if (k == 0) {
      out.curve.mean_gap[i] = kInf;
      out.curve.stderr_[i] = kInf;
      continue;
    }
    const double mean = sum / static_cast<double>(k);
    out.curve.mean_gap[i] = mean;
    if (k > 1) {
      const double var = std::max(0.0, (sumsq - static_cast<double>(k) * mean * mean) / static_cast<double>(k - 1));
      out.curve.stderr_[i] = std::sqrt(var / static_cast<double>(k));
    }
  }
}

}  // namespace

std::vector<std::uint64_t> log_checkpoints(std::uint64_t horizon, int per_decade) {
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  if (per_decade < 1 || per_decade > 64) throw std::invalid_argument("checkpoints per decade must lie in [1, 64]");
  std::vector<std::uint64_t> out;
  for (int k = 0;; ++k) {
    const auto c = static_cast<std::uint64_t>(std::llround(std::pow(10.0, static_cast<double>(k) / per_decade)));
    if (c >= horizon) break;
    if (out.empty() || c > out.back()) out.push_back(c);
  }
  out.push_back(horizon);
  return out;
}

InventoryOracle inventory_oracle(const inventory::InventoryParams& params, const RunOptions& options) {
  const auto cache = cache_for(options);
  const json key = inventory_key(params, options.loss_table);
  if (cache) {
    if (auto hit = cache->load("inventory", key)) {
      const auto& v = *hit;
      return {oracles::StationaryLossTable(v.at("lower").get<double>(), v.at("step").get<double>(),
                                           v.at("values").get<std::vector<double>>()),
              v.at("theta_star").get<double>(), v.at("loss_star").get<double>(), v.at("on_boundary").get<bool>(),
              v.at("diagnostic").get<std::string>()};
    }
  }
  auto table = oracles::build_loss_table(params, options.loss_table);
  const auto opt = oracles::inventory_optimum(table);
  InventoryOracle out{std::move(table), opt.point[0], opt.value, opt.on_boundary, opt.diagnostic};
  if (cache) {
    cache->store("inventory", key,
                 {{"lower", out.table.lower()},
                  {"step", out.table.step()},
                  {"values", out.table.values()},
                  {"theta_star", out.theta_star},
                  {"loss_star", out.loss_star},
                  {"on_boundary", out.on_boundary},
                  {"diagnostic", out.diagnostic}});
  }
  return out;
}

QueueOracle queue_oracle(const queue::QueueParams& params, const RunOptions& options) {
  const auto cache = cache_for(options);
  const json key = queue_key(params);
  if (cache) {
    if (auto hit = cache->load("queue", key)) {
      const auto& v = *hit;
      QueueOracle out;
      out.theta_star << v.at("mu").get<double>(), v.at("p").get<double>();
      out.loss_star = v.at("loss_star").get<double>();
      out.on_boundary = v.at("on_boundary").get<bool>();
      out.diagnostic = v.at("diagnostic").get<std::string>();
      return out;
    }
  }
  const auto opt = oracles::mm1_optimum(params);
  QueueOracle out;
  out.theta_star = opt.point;
  out.loss_star = opt.value;
  out.on_boundary = opt.on_boundary;
  out.diagnostic = opt.diagnostic;
  if (cache) {
    cache->store("queue", key,
                 {{"mu", out.theta_star[0]},
                  {"p", out.theta_star[1]},
                  {"loss_star", out.loss_star},
                  {"on_boundary", out.on_boundary},
                  {"diagnostic", out.diagnostic}});
  }
  return out;
}

std::vector<RlInstance> rl_instances(const RlParams& params, std::uint64_t count, const RunOptions& options) {
  std::vector<RlInstance> out(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    out[r].mdp = std::make_shared<const rl::MdpSpec>(
        rl::random_mdp(params.states, params.actions, params.gamma, derive_seed(params.mdp_seed, r)));
  }
  const auto cache = cache_for(options);
  const json key{{"states", params.states},
                 {"actions", params.actions},
                 {"gamma", params.gamma},
                 {"mdp_seed", params.mdp_seed},
                 {"count", count}};
  if (cache) {
    if (auto hit = cache->load("rl", key)) {
      const auto losses = hit->at("loss_star").get<std::vector<double>>();
      if (losses.size() == count) {
        for (std::uint64_t r = 0; r < count; ++r) out[r].loss_star = losses[r];
        return out;
      }
    }
  }
  std::vector<double> losses(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    out[r].loss_star = oracles::optimal_loss(*out[r].mdp).loss;
    losses[r] = out[r].loss_star;
  }
  if (cache) cache->store("rl", key, {{"loss_star", losses}});
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.checkpoints = log_checkpoints(config.horizon, config.checkpoints_per_decade);
  const auto& marks = result.checkpoints;
  const std::size_t nb = config.batches.size();
  const std::size_t nr = config.replications;
  std::vector<std::vector<ReplicationTrace>> traces(nb, std::vector<ReplicationTrace>(nr));

  auto check_boundary = [&](bool on_boundary, const std::string& diagnostic) {
    if (!on_boundary) return;
    if (!options.allow_boundary) throw BoundaryError("oracle optimum on the boundary: " + diagnostic);
    log_line(options, "warning: " + diagnostic);
  };

  switch (config.env) {
    case EnvKind::Inventory: {
      const auto oracle = inventory_oracle(config.inventory, options);
      check_boundary(oracle.on_boundary, oracle.diagnostic);
      log_line(options, config.id + ": theta* = " + std::to_string(oracle.theta_star) +
                            ", loss* = " + std::to_string(oracle.loss_star));
      std::optional<BoxProjection> box;
      if (config.projection) {
        box = BoxProjection((Eigen::VectorXd(1) << 0.0).finished(),
                            (Eigen::VectorXd(1) << config.inventory.theta_max).finished());
      }
      parallel_for(nb * nr, options.jobs, [&](std::size_t task) {
        const std::size_t b = task / nr;
        const std::size_t r = task % nr;
        inventory::InventoryEnv env(config.inventory);
        traces[b][r] = run_replication(env, config, config.batches[b], r, box, marks,
                                       [&](const ThetaVector& theta, std::uint64_t) {
                                         return oracle.table(theta[0]) - oracle.loss_star;
                                       });
      });
      break;
    }
    case EnvKind::Queue: {
      const auto oracle = queue_oracle(config.queue, options);
      check_boundary(oracle.on_boundary, oracle.diagnostic);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: (mu*, p*) = (%.6f, %.6f), loss* = %.8f", config.id.c_str(),
                    oracle.theta_star[0], oracle.theta_star[1], oracle.loss_star);
      log_line(options, buf);
      std::optional<BoxProjection> box;
      if (config.projection) box = config.queue.box();
      parallel_for(nb * nr, options.jobs, [&](std::size_t task) {
        const std::size_t b = task / nr;
        const std::size_t r = task % nr;
        queue::QueueEnv env(config.queue);
        traces[b][r] = run_replication(env, config, config.batches[b], r, box, marks,
                                       [&](const ThetaVector& theta, std::uint64_t) {
                                         try {
                                           return queue::mm1_loss(queue::QueueTheta::from_vector(theta),
                                                                  config.queue) -
                                                  oracle.loss_star;
                                         } catch (const std::domain_error&) {
                                           return kInf;
                                         }
                                       });
      });
      break;
    }
    case EnvKind::Rl: {
      const auto instances = rl_instances(config.rl, nr, options);
      log_line(options, config.id + ": " + std::to_string(nr) + " random MDP instances solved");
      const rl::ActorCriticOptions ac{config.rl.alpha, config.rl.critic_target};
      parallel_for(nb * nr, options.jobs, [&](std::size_t task) {
        const std::size_t b = task / nr;
        const std::size_t r = task % nr;
        const auto& inst = instances[r];
        rl::ActorCriticEnv env(inst.mdp, ac);
        traces[b][r] = run_replication(env, config, config.batches[b], r, std::nullopt, marks,
                                       [&](const ThetaVector& theta, std::uint64_t) {
                                         const auto policy = rl::SoftmaxPolicy::from_theta(
                                             theta, inst.mdp->states, inst.mdp->actions);
                                         return oracles::scaled_gap(oracles::exact_loss(*inst.mdp, policy),
                                                                    inst.loss_star);
                                       });
      });
      break;
    }
  }

  const auto window = oracles::default_fit_window(config.horizon);
  for (std::size_t b = 0; b < nb; ++b) {
    BatchResult br;
    br.batch = config.batches[b];
    aggregate(br, traces[b], marks);
    try {
      br.fit = oracles::fit_rate(br.curve, window.first, window.second);
    } catch (const std::invalid_argument& e) {
      br.fit_error = e.what();
    }
    result.batches.push_back(std::move(br));
  }
  return result;
}

}  // namespace adasgd::harness
