#pragma once

#include <memory>
#include <utility>

#include "adasgd/core/types.hpp"
#include "adasgd/env/mdp.hpp"

namespace adasgd::rl {

/// Kernel used to draw the pair (s'', a'') that bootstraps the TD target.
///
/// Transition draws s'' ~ P(.|s, a_hat) and a'' ~ pi(.|s''); the critic's
/// stationary conditional mean is then the MDP action-value Q^pi.
/// Occupancy draws (s'', a'') from the regenerating occupancy kernel, which is
/// the same kernel the actor uses; its critic mean is the fixed point of
/// Q = c + gamma K_pi Q with K_pi the regenerating kernel, not Q^pi.
enum class CriticTarget { Transition, Occupancy };

std::string_view to_string(CriticTarget target);
CriticTarget parse_critic_target(std::string_view name);

/// The Markov triad (s, a, Q) carried by the actor-critic sampler.
struct TdState {
  int s = 0;
  int a = 0;
  RowMatrix q;
};

struct KernelDraw {
  int s = 0;
  int a = 0;
  bool regenerated = false;  ///< s was drawn from rho rather than P(.|s,a)
};

/// One step of the occupancy kernel
///   K((s,a),(s',a')) = (1-gamma) rho(s') pi(a'|s') + gamma P(s'|s,a) pi(a'|s').
KernelDraw occupancy_kernel_sample(int s, int a, const SoftmaxPolicy& policy, const MdpSpec& mdp, Rng& rng);

/// s' ~ P(.|s,a), a' ~ pi(.|s') with no regeneration.
KernelDraw transition_sample(int s, int a, const SoftmaxPolicy& policy, const MdpSpec& mdp, Rng& rng);

/// Q'(s, a_hat) = Q(s, a_hat) + alpha [c(s, a_hat) - Q(s, a_hat) + gamma Q(s'', a'')]; all other entries unchanged.
RowMatrix td_update(const RowMatrix& q, int s, int a_hat, int s_next, int a_next, const MdpSpec& mdp, double alpha);
void apply_td_update(RowMatrix& q, int s, int a_hat, int s_next, int a_next, const MdpSpec& mdp, double alpha);

/// Q'(s', a') grad log pi(a'|s'): nonzero only in row s'.
RowMatrix pg_estimator(int s_next, int a_next, const RowMatrix& q_next, const SoftmaxPolicy& policy);

struct ActorCriticOptions {
  double alpha = 0.5;  ///< TD step
  CriticTarget critic_target = CriticTarget::Transition;
};

/// The pg estimate computed during a step together with the advanced triad.
struct ActorCriticTransition {
  TdState state;
  RowMatrix gradient;
};

/// Advances (s, a, Q) once under a fixed policy and returns the policy-gradient sample.
ActorCriticTransition actor_critic_transition(const TdState& state, const SoftmaxPolicy& policy, const MdpSpec& mdp,
                                              const ActorCriticOptions& options, Rng& rng);

/// In-place form of actor_critic_transition; returns the policy-gradient sample
/// and, if requested, the actor's kernel draw.
RowMatrix advance_in_place(TdState& state, const SoftmaxPolicy& policy, const MdpSpec& mdp,
                           const ActorCriticOptions& options, Rng& rng, KernelDraw* actor_draw = nullptr);

/// Full unprojected actor-critic update: transition, TD update, theta' = theta - eta g.
std::pair<TdState, SoftmaxPolicy> actor_critic_step(const TdState& state, const SoftmaxPolicy& policy,
                                                    const MdpSpec& mdp, const ActorCriticOptions& options, double eta,
                                                    Rng& rng);

/// s0 ~ rho, a0 ~ pi(.|s0), Q0 = 0.
TdState initial_td_state(const SoftmaxPolicy& policy, const MdpSpec& mdp, Rng& rng);

/// Adaptive environment: logits flattened row-major; Theta = R^{S x A}.
class ActorCriticEnv {
 public:
  ActorCriticEnv(std::shared_ptr<const MdpSpec> mdp, ActorCriticOptions options);

  Eigen::Index dimension() const { return mdp_->pairs(); }
  void reset(const ThetaVector& theta, Rng& rng);
  GradientSample sample(const ThetaVector& theta, Rng& rng);

  const TdState& state() const { return state_; }
  const MdpSpec& mdp() const { return *mdp_; }

 private:
  std::shared_ptr<const MdpSpec> mdp_;
  ActorCriticOptions options_;
  TdState state_;
  bool warned_large_logits_ = false;
};

}  // namespace adasgd::rl
