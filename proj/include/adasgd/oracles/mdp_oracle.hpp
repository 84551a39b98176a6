#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "adasgd/env/mdp.hpp"

namespace adasgd::oracles {

using rl::MdpSpec;
using rl::RowMatrix;
using rl::SoftmaxPolicy;

struct ValueIterationResult {
  RowMatrix q;
  int sweeps = 0;
  std::vector<double> residuals;  ///< sup-norm change per sweep
};

/// Bellman iteration from Q = 0 until the sup-norm error bound drops below tol.
/// With a policy, iterates Q <- c + gamma P (pi . Q); without one, Q <- c + gamma P min_a Q.
ValueIterationResult value_iteration(const MdpSpec& mdp, const SoftmaxPolicy* policy, double tol);

/// ceil(log(tol (1 - gamma) / (2 M)) / log gamma), the sweep budget value_iteration respects.
int value_iteration_sweep_bound(const MdpSpec& mdp, double tol);

/// Q^pi by the direct solve (I - gamma P_pi) Q = c over state-action pairs.
RowMatrix policy_q_linear_solve(const MdpSpec& mdp, const SoftmaxPolicy& policy);

/// V^pi by the S x S solve (I - gamma P_pi) V = c_pi.
Eigen::VectorXd policy_state_values(const MdpSpec& mdp, const RowMatrix& pi);

/// Occupancy kernel K((s,a),(s',a')) = (1-gamma) rho(s') pi(a'|s') + gamma P(s'|s,a) pi(a'|s').
Eigen::MatrixXd occupancy_kernel_matrix(const MdpSpec& mdp, const SoftmaxPolicy& policy);

/// Probability-normalized stationary law of the occupancy kernel (sums to 1).
RowMatrix occupancy_solve(const MdpSpec& mdp, const SoftmaxPolicy& policy);

/// Truncated series sum_{t <= horizon} (1 - gamma) gamma^t Pr(s_t = s, a_t = a) from s_0 ~ rho.
RowMatrix occupancy_series(const MdpSpec& mdp, const SoftmaxPolicy& policy, int horizon);

/// Fixed point of Q = c + gamma K Q with K the occupancy kernel: the critic's
/// conditional mean when its bootstrap pair is drawn from K.
RowMatrix occupancy_critic_fixed_point(const MdpSpec& mdp, const SoftmaxPolicy& policy);

/// l(theta) = sum_s rho(s) V^theta(s).
double exact_loss(const MdpSpec& mdp, const SoftmaxPolicy& policy);

/// Gradient of exact_loss with respect to the logits:
///   (1 / (1 - gamma)) sum_{s,a} nu(s,a) Q(s,a) grad log pi(a|s),  nu summing to 1.
RowMatrix exact_pg_gradient(const MdpSpec& mdp, const SoftmaxPolicy& policy);

/// sum_{s,a} nu(s,a) Q(s,a) (e_a - pi(.|s)) assembled entrywise. The actor-critic
/// estimator's stationary mean; equals (1 - gamma) exact_pg_gradient.
RowMatrix occupancy_weighted_pg(const MdpSpec& mdp, const SoftmaxPolicy& policy);

/// Central finite differences of exact_loss in every logit.
RowMatrix finite_difference_pg(const MdpSpec& mdp, const SoftmaxPolicy& policy, double delta);

struct OptimalPolicy {
  RowMatrix q;                ///< optimal action values from value iteration
  std::vector<int> actions;   ///< greedy action per state
  double loss = 0.0;          ///< exact loss of the greedy policy under rho
};

/// Value iteration to tol, then an exact evaluation of the greedy deterministic policy.
OptimalPolicy optimal_loss(const MdpSpec& mdp, double tol = 1e-12);

/// (l(theta) - l*) / l*.
double scaled_gap(double loss, double optimal);

}  // namespace adasgd::oracles
