#include "adasgd/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "adasgd/env/inventory.hpp"
#include "adasgd/env/queue.hpp"
#include "adasgd/oracles/inventory_oracle.hpp"
#include "adasgd/oracles/mdp_oracle.hpp"
#include "adasgd/oracles/queue_oracle.hpp"

namespace adasgd::harness {

using oracles::BatchMeans;
using oracles::Estimate;

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

rl::SoftmaxPolicy random_policy(int states, int actions, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  rl::RowMatrix logits(states, actions);
  for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = normal(rng);
  return rl::SoftmaxPolicy(std::move(logits));
}

// Largest |mean - target| / stderr over all entries.
double worst_z(const std::vector<Estimate>& estimates, const Eigen::VectorXd& target) {
  double worst = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    worst = std::max(worst, oracles::standardized_difference(estimates[i], {target[static_cast<Eigen::Index>(i)], 0.0}));
  }
  return worst;
}

Eigen::VectorXd flat(const rl::RowMatrix& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

const double kInventoryThetas[] = {4.0, 7.0, 10.0};
const queue::QueueTheta kQueueThetas[] = {{9.25, 5.9}, {8.0, 4.5}, {11.0, 7.0}};

}  // namespace

CheckBudget CheckBudget::fast() {
  CheckBudget b;
  b.ipa_paths = 200;
  b.inventory_samples = 200'000;
  b.queue_arrivals = 500'000;
  b.rl_steps = 500'000;
  b.burn_in = 2'000;
  return b;
}

RlStationaryStats rl_stationary_run(const rl::MdpSpec& mdp, const rl::SoftmaxPolicy& policy,
                                    const rl::ActorCriticOptions& options, std::uint64_t burn_in,
                                    std::uint64_t steps, std::uint64_t seed) {
  const int pairs = mdp.pairs();
  std::vector<BatchMeans> visits(static_cast<std::size_t>(pairs));
  std::vector<BatchMeans> critic(static_cast<std::size_t>(pairs));
  std::vector<BatchMeans> grad(static_cast<std::size_t>(pairs));
  Rng rng(seed);
  rl::TdState state = rl::initial_td_state(policy, mdp, rng);
  RlStationaryStats out;
  std::uint64_t regenerations = 0;
  rl::KernelDraw draw;
  for (std::uint64_t t = 0; t < burn_in + steps; ++t) {
    const rl::RowMatrix g = rl::advance_in_place(state, policy, mdp, options, rng, &draw);
    out.max_abs_q = std::max(out.max_abs_q, state.q.cwiseAbs().maxCoeff());
    if (t < burn_in) continue;
    const int batch = oracles::batch_of(t - burn_in, steps);
    const int here = mdp.index(state.s, state.a);
    if (draw.regenerated) ++regenerations;
    for (int k = 0; k < pairs; ++k) {
      visits[static_cast<std::size_t>(k)].add(batch, k == here ? 1.0 : 0.0);
      grad[static_cast<std::size_t>(k)].add(batch, g.data()[k]);
    }
    critic[static_cast<std::size_t>(here)].add(batch, state.q(state.s, state.a));
  }
  for (int k = 0; k < pairs; ++k) {
    out.visit_frequency.push_back(visits[static_cast<std::size_t>(k)].estimate());
    out.critic_mean.push_back(critic[static_cast<std::size_t>(k)].estimate());
    out.gradient_mean.push_back(grad[static_cast<std::size_t>(k)].estimate());
  }
  out.regeneration_fraction = static_cast<double>(regenerations) / static_cast<double>(steps);
  out.steps = steps;
  return out;
}

rl::MdpSpec check_mdp() { return rl::random_mdp(3, 2, 0.8, 2024); }

rl::SoftmaxPolicy check_policy(const rl::MdpSpec& mdp, std::uint64_t seed) {
  return random_policy(mdp.states, mdp.actions, seed);
}

CheckResult check_inventory_ipa(const CheckBudget& budget) {
  CheckResult r{"inventory IPA derivative vs common-random-number finite difference", false, ""};
  const inventory::InventoryParams params;
  const double delta = 1e-5;
  Rng rng(derive_seed(budget.seed, 9));
  std::uniform_real_distribution<double> level(2.0, 14.0);
  inventory::NoiseSampler sampler(params.sigma);
  std::vector<inventory::InventoryNoise> noise(static_cast<std::size_t>(budget.ipa_horizon));
  std::uint64_t accepted = 0;
  std::uint64_t skipped = 0;
  double worst = 0.0;
  while (accepted < budget.ipa_paths) {
    const double theta = level(rng);
    for (auto& n : noise) n = sampler(rng);
    inventory::InventoryState base, up, down;
    bool kink = false;
    double path_worst = 0.0;
    for (const auto& n : noise) {
      const bool out_up = up.demand + n.u > theta + delta;
      const bool out_down = down.demand + n.u > theta - delta;
      base = inventory::inventory_transition(base, theta, params, n);
      up = inventory::inventory_transition(up, theta + delta, params, n);
      down = inventory::inventory_transition(down, theta - delta, params, n);
      // A branch flip between the perturbed paths means a kink lies within delta of theta.
      if (out_up != out_down || (up.demand > 0.0) != (down.demand > 0.0)) {
        kink = true;
        break;
      }
      const double fd = (up.demand - down.demand) / (2.0 * delta);
      path_worst = std::max(path_worst, std::abs(fd - base.derivative));
    }
    if (kink) {
      ++skipped;
      continue;
    }
    ++accepted;
    worst = std::max(worst, path_worst);
  }
  r.passed = worst <= 1e-4;
  r.detail = fmt("max |L - FD| = %.3g over %.0f paths (t <= %.0f), skip rate %.4f", worst,
                 static_cast<double>(accepted), budget.ipa_horizon,
                 static_cast<double>(skipped) / static_cast<double>(skipped + accepted));
  return r;
}

CheckResult check_inventory_unbiased(const CheckBudget& budget) {
  CheckResult r{"inventory estimator mean vs finite difference of stationary loss", true, ""};
  const inventory::InventoryParams params;
  int idx = 0;
  for (double theta : kInventoryThetas) {
    Rng rng(derive_seed(budget.seed, 70 + static_cast<std::uint64_t>(idx)));
    inventory::NoiseSampler sampler(params.sigma);
    inventory::InventoryState state;
    BatchMeans bm;
    for (std::uint64_t t = 0; t < budget.burn_in + budget.inventory_samples; ++t) {
      state = inventory::inventory_transition(state, theta, params, sampler(rng));
      if (t >= budget.burn_in) {
        bm.add(oracles::batch_of(t - budget.burn_in, budget.inventory_samples),
               inventory::inventory_gradient(state, theta, params));
      }
    }
    const Estimate g = bm.estimate();
    const Estimate fd = oracles::mc_loss_derivative(params, theta, 0.05, budget.burn_in, budget.inventory_samples,
                                                    derive_seed(budget.seed, 80 + static_cast<std::uint64_t>(idx)));
    const double z = oracles::standardized_difference(g, fd);
    r.passed = r.passed && z <= 3.0;
    r.detail += fmt("theta=%.1f: g=%.4f fd=%.4f z=%.2f; ", theta, g.mean, fd.mean, z);
    ++idx;
  }
  return r;
}

CheckResult check_inventory_derivative_bound(const CheckBudget& budget) {
  CheckResult r{"inventory derivative stays in [0, alpha] and demand non-negative", true, ""};
  const inventory::InventoryParams params;
  Rng rng(derive_seed(budget.seed, 11));
  inventory::NoiseSampler sampler(params.sigma);
  inventory::InventoryState state;
  for (std::uint64_t t = 0; t < budget.inventory_samples; ++t) {
    state = inventory::inventory_transition(state, 7.0, params, sampler(rng));
    if (state.demand < 0.0 || state.derivative < 0.0 || state.derivative > params.alpha) {
      r.passed = false;
      r.detail = fmt("violation at step %.0f: D=%.4f L=%.4f", static_cast<double>(t), state.demand, state.derivative);
      return r;
    }
  }
  r.detail = fmt("%.0f steps at theta=7", static_cast<double>(budget.inventory_samples));
  return r;
}

CheckResult check_queue_unbiased(const CheckBudget& budget) {
  CheckResult r{"queue estimator mean vs analytic M/M/1 gradient", true, ""};
  const queue::QueueParams params;
  int idx = 0;
  for (const auto& theta : kQueueThetas) {
    Rng rng(derive_seed(budget.seed, 100 + static_cast<std::uint64_t>(idx)));
    queue::ExponentialSampler sampler;
    queue::QueueState state;
    BatchMeans g_mu;
    BatchMeans g_p;
    for (std::uint64_t t = 0; t < budget.burn_in + budget.queue_arrivals; ++t) {
      state = queue::queue_transition(state, theta, params, sampler(rng));
      if (t < budget.burn_in) continue;
      const auto g = queue::queue_gradient(state, theta, params);
      const int batch = oracles::batch_of(t - budget.burn_in, budget.queue_arrivals);
      g_mu.add(batch, g[0]);
      g_p.add(batch, g[1]);
    }
    const auto exact = oracles::mm1_gradient(theta, params);
    const Estimate em = g_mu.estimate();
    const Estimate ep = g_p.estimate();
    const double zm = oracles::standardized_difference(em, {exact[0], 0.0});
    const double zp = oracles::standardized_difference(ep, {exact[1], 0.0});
    r.passed = r.passed && zm <= 3.0 && zp <= 3.0;
    r.detail += fmt("(%.2f,%.2f): ", theta.mu, theta.p) +
                fmt("z_mu=%.2f z_p=%.2f; ", zm, zp);
    ++idx;
  }
  return r;
}

CheckResult check_queue_little(const CheckBudget& budget) {
  CheckResult r{"simulated M/M/1 mean wait vs lambda/(mu(mu-lambda))", false, ""};
  const queue::QueueParams params;
  const queue::QueueTheta theta{(params.mu_low + params.mu_high) / 2.0, (params.p_low + params.p_high) / 2.0};
  Rng rng(derive_seed(budget.seed, 110));
  queue::ExponentialSampler sampler;
  queue::QueueState state;
  double wait = 0.0;
  double busy = 0.0;
  for (std::uint64_t t = 0; t < budget.burn_in + budget.queue_arrivals; ++t) {
    state = queue::queue_transition(state, theta, params, sampler(rng));
    if (t < budget.burn_in) continue;
    wait += state.wait;
    busy += state.busy;
  }
  const double n = static_cast<double>(budget.queue_arrivals);
  const double ew = oracles::mm1_mean_wait(theta, params);
  const double ex = oracles::mm1_mean_busy(theta, params);
  const double rel_w = std::abs(wait / n - ew) / ew;
  const double rel_x = std::abs(busy / n - ex) / ex;
  r.passed = rel_w <= 0.01;
  r.detail = fmt("E[W]: sim %.6f exact %.6f (rel %.4f); E[X] rel %.4f", wait / n, ew, rel_w, rel_x);
  return r;
}

CheckResult check_queue_regeneration(const CheckBudget& budget) {
  CheckResult r{"queue W'=0 implies X'=0 and W, X >= 0", true, ""};
  const queue::QueueParams params;
  const queue::QueueTheta theta{params.mu_low, params.p_low};
  Rng rng(derive_seed(budget.seed, 120));
  queue::ExponentialSampler sampler;
  queue::QueueState state;
  for (std::uint64_t t = 0; t < budget.queue_arrivals / 10; ++t) {
    state = queue::queue_transition(state, theta, params, sampler(rng));
    if (state.wait < 0.0 || state.busy < 0.0 || (state.wait == 0.0 && state.busy != 0.0)) {
      r.passed = false;
      r.detail = fmt("violation at step %.0f: W=%.4g X=%.4g", static_cast<double>(t), state.wait, state.busy);
      return r;
    }
  }
  r.detail = fmt("%.0f transitions at the most congested corner", static_cast<double>(budget.queue_arrivals / 10));
  return r;
}

CheckResult check_rl_occupancy(const CheckBudget& budget) {
  CheckResult r{"actor-critic (s,a) visit frequencies vs occupancy solve", false, ""};
  const auto mdp = check_mdp();
  const auto policy = check_policy(mdp, derive_seed(budget.seed, 200));
  const auto stats =
      rl_stationary_run(mdp, policy, {0.5, rl::CriticTarget::Transition}, budget.burn_in, budget.rl_steps,
                        derive_seed(budget.seed, 201));
  const double z = worst_z(stats.visit_frequency, flat(oracles::occupancy_solve(mdp, policy)));
  r.passed = z <= 4.0;
  r.detail = fmt("worst z = %.2f over %.0f pairs, %.0f steps", z, mdp.pairs(), static_cast<double>(stats.steps));
  return r;
}

CheckResult check_rl_critic(const CheckBudget& budget) {
  CheckResult r{"actor-critic conditional critic mean vs value-iteration Q", false, ""};
  const auto mdp = check_mdp();
  const auto policy = check_policy(mdp, derive_seed(budget.seed, 200));
  const auto stats =
      rl_stationary_run(mdp, policy, {0.5, rl::CriticTarget::Transition}, budget.burn_in, budget.rl_steps,
                        derive_seed(budget.seed, 202));
  const auto q = oracles::value_iteration(mdp, &policy, 1e-12).q;
  const double z = worst_z(stats.critic_mean, flat(q));
  const double bound = mdp.cost_bound() / (1.0 - mdp.gamma);
  r.passed = z <= 3.0 && stats.max_abs_q <= bound;
  r.detail = fmt("worst z = %.2f, max |Q| = %.4f <= %.4f, %.0f steps", z, stats.max_abs_q, bound,
                 static_cast<double>(stats.steps));
  return r;
}

CheckResult check_rl_unbiased(const CheckBudget& budget) {
  CheckResult r{"actor-critic estimator mean vs (1-gamma) exact policy gradient", true, ""};
  const auto mdp = check_mdp();
  for (std::uint64_t i = 0; i < 3; ++i) {
    const auto policy = check_policy(mdp, derive_seed(budget.seed, 210 + i));
    const auto stats = rl_stationary_run(mdp, policy, {0.5, rl::CriticTarget::Transition}, budget.burn_in,
                                         budget.rl_steps, derive_seed(budget.seed, 220 + i));
    const Eigen::VectorXd target = (1.0 - mdp.gamma) * flat(oracles::exact_pg_gradient(mdp, policy));
    const double z = worst_z(stats.gradient_mean, target);
    r.passed = r.passed && z <= 3.0;
    r.detail += fmt("theta %.0f: worst z = %.2f; ", static_cast<double>(i), z);
  }
  return r;
}

CheckResult check_rl_regeneration(const CheckBudget& budget) {
  CheckResult r{"occupancy kernel regeneration frequency vs 1 - gamma", false, ""};
  const auto mdp = check_mdp();
  const auto policy = check_policy(mdp, derive_seed(budget.seed, 200));
  Rng rng(derive_seed(budget.seed, 230));
  const std::uint64_t n = budget.rl_steps / 10;
  std::uint64_t hits = 0;
  int s = 0;
  int a = 0;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto draw = rl::occupancy_kernel_sample(s, a, policy, mdp, rng);
    hits += draw.regenerated ? 1 : 0;
    s = draw.s;
    a = draw.a;
  }
  const double p = 1.0 - mdp.gamma;
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  const double z = std::abs(static_cast<double>(hits) / static_cast<double>(n) - p) / sigma;
  r.passed = z <= 4.0;
  r.detail = fmt("fraction %.5f vs %.5f, z = %.2f", static_cast<double>(hits) / static_cast<double>(n), p, z);
  return r;
}

CheckResult check_rl_score(const CheckBudget& budget) {
  CheckResult r{"softmax score has zero mean under the policy", false, ""};
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto policy = random_policy(5, 4, derive_seed(budget.seed, 240 + i));
    for (int s = 0; s < 5; ++s) {
      const auto pi = policy.probabilities(s);
      rl::RowMatrix total = rl::RowMatrix::Zero(5, 4);
      for (int a = 0; a < 4; ++a) total += pi[a] * policy.score(s, a);
      worst = std::max(worst, total.cwiseAbs().maxCoeff());
    }
  }
  r.passed = worst <= 1e-10;
  r.detail = fmt("max |sum_a pi grad log pi| = %.3g", worst);
  return r;
}

CheckResult check_oracle_value_iteration(const CheckBudget& budget) {
  CheckResult r{"value iteration vs linear policy-evaluation solve", false, ""};
  const auto mdp = rl::random_mdp(5, 5, 0.8, derive_seed(budget.seed, 300));
  const auto policy = random_policy(5, 5, derive_seed(budget.seed, 301));
  const auto vi = oracles::value_iteration(mdp, &policy, 1e-12);
  const double diff = (vi.q - oracles::policy_q_linear_solve(mdp, policy)).cwiseAbs().maxCoeff();
  // Rounding limits the contraction once the change nears machine precision.
  bool contracting = true;
  for (std::size_t k = 1; k < vi.residuals.size(); ++k) {
    contracting = contracting && vi.residuals[k] <= mdp.gamma * vi.residuals[k - 1] + 1e-13;
  }
  const int bound = oracles::value_iteration_sweep_bound(mdp, 1e-12);
  r.passed = diff <= 1e-8 && contracting && vi.sweeps <= bound;
  r.detail = fmt("max diff %.3g, sweeps %.0f <= %.0f, residual contraction ", diff, vi.sweeps, bound) +
             (contracting ? "ok" : "violated");
  return r;
}

CheckResult check_oracle_pg(const CheckBudget& budget) {
  CheckResult r{"exact policy gradient vs finite differences of exact loss", false, ""};
  const auto mdp = rl::random_mdp(5, 5, 0.8, derive_seed(budget.seed, 310));
  const auto policy = random_policy(5, 5, derive_seed(budget.seed, 311));
  const auto exact = oracles::exact_pg_gradient(mdp, policy);
  const double fd = (exact - oracles::finite_difference_pg(mdp, policy, 1e-5)).cwiseAbs().maxCoeff();
  const double conv =
      (oracles::occupancy_weighted_pg(mdp, policy) - (1.0 - mdp.gamma) * exact).cwiseAbs().maxCoeff();
  r.passed = fd <= 1e-6 && conv <= 1e-10;
  r.detail = fmt("max |exact - FD| = %.3g, |nu-weighted - (1-gamma) exact| = %.3g", fd, conv);
  return r;
}

CheckResult check_oracle_occupancy(const CheckBudget& budget) {
  CheckResult r{"occupancy solve vs truncated discounted series", false, ""};
  const auto mdp = check_mdp();
  const auto policy = check_policy(mdp, derive_seed(budget.seed, 200));
  const auto nu = oracles::occupancy_solve(mdp, policy);
  const double diff = (nu - oracles::occupancy_series(mdp, policy, 200)).cwiseAbs().maxCoeff();
  const double mass = std::abs(nu.sum() - 1.0);
  r.passed = diff <= 1e-8 && mass <= 1e-10 && nu.minCoeff() >= 0.0;
  r.detail = fmt("max diff %.3g, |sum - 1| = %.3g, min %.4f", diff, mass, nu.minCoeff());
  return r;
}

std::vector<CheckResult> run_checks(std::optional<EnvKind> env, const CheckBudget& budget) {
  std::vector<CheckResult> out;
  const bool all = !env.has_value();
  if (all || env == EnvKind::Inventory) {
    out.push_back(check_inventory_ipa(budget));
    out.push_back(check_inventory_derivative_bound(budget));
    out.push_back(check_inventory_unbiased(budget));
  }
  if (all || env == EnvKind::Queue) {
    out.push_back(check_queue_regeneration(budget));
    out.push_back(check_queue_little(budget));
    out.push_back(check_queue_unbiased(budget));
  }
  if (all || env == EnvKind::Rl) {
    out.push_back(check_oracle_value_iteration(budget));
    out.push_back(check_oracle_occupancy(budget));
    out.push_back(check_oracle_pg(budget));
    out.push_back(check_rl_score(budget));
    out.push_back(check_rl_regeneration(budget));
    out.push_back(check_rl_occupancy(budget));
    out.push_back(check_rl_critic(budget));
    out.push_back(check_rl_unbiased(budget));
  }
  return out;
}

}  // namespace adasgd::harness
