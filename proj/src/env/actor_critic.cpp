#include "adasgd/env/actor_critic.hpp"

#include <iostream>
#include <stdexcept>
#include <string>

namespace adasgd::rl {

namespace {

constexpr double kLogitGuard = 50.0;

double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

std::string_view to_string(CriticTarget target) {
  return target == CriticTarget::Transition ? "transition" : "occupancy";
}

CriticTarget parse_critic_target(std::string_view name) {
  if (name == "transition") return CriticTarget::Transition;
  if (name == "occupancy") return CriticTarget::Occupancy;
  throw std::invalid_argument("unknown critic target '" + std::string(name) + "'");
}

KernelDraw occupancy_kernel_sample(int s, int a, const SoftmaxPolicy& policy, const MdpSpec& mdp, Rng& rng) {
  KernelDraw draw;
  draw.regenerated = unit(rng) >= mdp.gamma;
  if (draw.regenerated) {
    draw.s = sample_categorical(mdp.rho, unit(rng));
  } else {
    draw.s = sample_categorical(mdp.next_state_distribution(s, a), unit(rng));
  }
  draw.a = sample_categorical(policy.probabilities(draw.s), unit(rng));
  return draw;
}

KernelDraw transition_sample(int s, int a, const SoftmaxPolicy& policy, const MdpSpec& mdp, Rng& rng) {
  KernelDraw draw;
  draw.s = sample_categorical(mdp.next_state_distribution(s, a), unit(rng));
  draw.a = sample_categorical(policy.probabilities(draw.s), unit(rng));
  return draw;
}

void apply_td_update(RowMatrix& q, int s, int a_hat, int s_next, int a_next, const MdpSpec& mdp, double alpha) {
  const double target = mdp.cost(s, a_hat) + mdp.gamma * q(s_next, a_next);
  q(s, a_hat) += alpha * (target - q(s, a_hat));
}

RowMatrix td_update(const RowMatrix& q, int s, int a_hat, int s_next, int a_next, const MdpSpec& mdp, double alpha) {
  RowMatrix out = q;
  apply_td_update(out, s, a_hat, s_next, a_next, mdp, alpha);
  return out;
}

RowMatrix pg_estimator(int s_next, int a_next, const RowMatrix& q_next, const SoftmaxPolicy& policy) {
  return q_next(s_next, a_next) * policy.score(s_next, a_next);
}

RowMatrix advance_in_place(TdState& state, const SoftmaxPolicy& policy, const MdpSpec& mdp,
                           const ActorCriticOptions& options, Rng& rng, KernelDraw* actor_draw) {
  const int a_hat = std::uniform_int_distribution<int>(0, mdp.actions - 1)(rng);
  const KernelDraw actor = occupancy_kernel_sample(state.s, state.a, policy, mdp, rng);
  const KernelDraw critic = options.critic_target == CriticTarget::Occupancy
                                ? occupancy_kernel_sample(state.s, a_hat, policy, mdp, rng)
                                : transition_sample(state.s, a_hat, policy, mdp, rng);
  apply_td_update(state.q, state.s, a_hat, critic.s, critic.a, mdp, options.alpha);
  state.s = actor.s;
  state.a = actor.a;
  if (actor_draw != nullptr) *actor_draw = actor;
  return pg_estimator(actor.s, actor.a, state.q, policy);
}

ActorCriticTransition actor_critic_transition(const TdState& state, const SoftmaxPolicy& policy, const MdpSpec& mdp,
                                              const ActorCriticOptions& options, Rng& rng) {
  ActorCriticTransition out;
  out.state = state;
  out.gradient = advance_in_place(out.state, policy, mdp, options, rng);
  return out;
}

std::pair<TdState, SoftmaxPolicy> actor_critic_step(const TdState& state, const SoftmaxPolicy& policy,
                                                    const MdpSpec& mdp, const ActorCriticOptions& options, double eta,
                                                    Rng& rng) {
  auto step = actor_critic_transition(state, policy, mdp, options, rng);
  RowMatrix logits = policy.logits() - eta * step.gradient;
  return {std::move(step.state), SoftmaxPolicy(std::move(logits))};
}

TdState initial_td_state(const SoftmaxPolicy& policy, const MdpSpec& mdp, Rng& rng) {
  TdState state;
  state.s = sample_categorical(mdp.rho, unit(rng));
  state.a = sample_categorical(policy.probabilities(state.s), unit(rng));
  state.q = RowMatrix::Zero(mdp.states, mdp.actions);
  return state;
}

ActorCriticEnv::ActorCriticEnv(std::shared_ptr<const MdpSpec> mdp, ActorCriticOptions options)
    : mdp_(std::move(mdp)), options_(options) {
  if (!mdp_) throw std::invalid_argument("actor-critic environment needs an MDP");
  mdp_->validate();
  if (!(options_.alpha >= 0.0 && options_.alpha < 1.0)) throw std::invalid_argument("TD step alpha must lie in [0, 1)");
}

void ActorCriticEnv::reset(const ThetaVector& theta, Rng& rng) {
  state_ = initial_td_state(SoftmaxPolicy::from_theta(theta, mdp_->states, mdp_->actions), *mdp_, rng);
  warned_large_logits_ = false;
}

GradientSample ActorCriticEnv::sample(const ThetaVector& theta, Rng& rng) {
  if (!warned_large_logits_ && theta.cwiseAbs().maxCoeff() > kLogitGuard) {
    std::cerr << "actor-critic: |theta|_inf exceeded " << kLogitGuard << '\n';
    warned_large_logits_ = true;
  }
  const auto policy = SoftmaxPolicy::from_theta(theta, mdp_->states, mdp_->actions);
  const RowMatrix g = advance_in_place(state_, policy, *mdp_, options_, rng);
  return Eigen::Map<const GradientSample>(g.data(), g.size());
}

}  // namespace adasgd::rl
