#include "adasgd/oracles/mdp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

namespace adasgd::oracles {

namespace {

// Q <- c + gamma P v, with v the continuation value per next state.
RowMatrix bellman(const MdpSpec& mdp, const Eigen::VectorXd& v) {
  RowMatrix out(mdp.states, mdp.actions);
  for (int s = 0; s < mdp.states; ++s) {
    for (int a = 0; a < mdp.actions; ++a) {
      const auto row = mdp.next_state_distribution(s, a);
      double ev = 0.0;
      for (int k = 0; k < mdp.states; ++k) ev += row[static_cast<std::size_t>(k)] * v[k];
      out(s, a) = mdp.cost(s, a) + mdp.gamma * ev;
    }
  }
  return out;
}

// Pair-to-pair kernel P_pi((s,a),(s',a')) = P(s'|s,a) pi(a'|s').
Eigen::MatrixXd pair_transition(const MdpSpec& mdp, const RowMatrix& pi) {
  const int n = mdp.pairs();
  Eigen::MatrixXd k(n, n);
  for (int s = 0; s < mdp.states; ++s) {
    for (int a = 0; a < mdp.actions; ++a) {
      for (int s2 = 0; s2 < mdp.states; ++s2) {
        for (int a2 = 0; a2 < mdp.actions; ++a2) {
          k(mdp.index(s, a), mdp.index(s2, a2)) = mdp.prob(s, a, s2) * pi(s2, a2);
        }
      }
    }
  }
  return k;
}

Eigen::VectorXd flatten(const RowMatrix& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

RowMatrix unflatten(const Eigen::VectorXd& v, int rows, int cols) {
  return Eigen::Map<const RowMatrix>(v.data(), rows, cols);
}

RowMatrix deterministic_policy_table(const MdpSpec& mdp, const std::vector<int>& actions) {
  RowMatrix pi = RowMatrix::Zero(mdp.states, mdp.actions);
  for (int s = 0; s < mdp.states; ++s) pi(s, actions[static_cast<std::size_t>(s)]) = 1.0;
  return pi;
}

}  // namespace

int value_iteration_sweep_bound(const MdpSpec& mdp, double tol) {
  const double m = std::max(mdp.cost_bound(), std::numeric_limits<double>::min());
  const double ratio = tol * (1.0 - mdp.gamma) / (2.0 * m);
  if (ratio >= 1.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(std::log(ratio) / std::log(mdp.gamma))));
}

ValueIterationResult value_iteration(const MdpSpec& mdp, const SoftmaxPolicy* policy, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("value iteration tolerance must be positive");
  mdp.validate();
  const RowMatrix pi = policy != nullptr ? policy->probability_table() : RowMatrix();
  const int max_sweeps = value_iteration_sweep_bound(mdp, tol);
  // Stopping once gamma/(1-gamma) times the last change is below tol bounds the
  // distance to the fixed point by tol.
  const double stop = tol * (1.0 - mdp.gamma) / mdp.gamma;

  ValueIterationResult result;
  result.q = RowMatrix::Zero(mdp.states, mdp.actions);
  Eigen::VectorXd v(mdp.states);
  while (result.sweeps < max_sweeps) {
    for (int s = 0; s < mdp.states; ++s) {
      v[s] = policy != nullptr ? pi.row(s).dot(result.q.row(s)) : result.q.row(s).minCoeff();
    }
    RowMatrix next = bellman(mdp, v);
    const double change = (next - result.q).cwiseAbs().maxCoeff();
    result.q = std::move(next);
    result.residuals.push_back(change);
    ++result.sweeps;
    if (change <= stop) break;
  }
  return result;
}

Eigen::VectorXd policy_state_values(const MdpSpec& mdp, const RowMatrix& pi) {
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(mdp.states, mdp.states);
  Eigen::VectorXd c_pi(mdp.states);
  for (int s = 0; s < mdp.states; ++s) {
    c_pi[s] = pi.row(s).dot(mdp.cost.row(s));
    for (int a = 0; a < mdp.actions; ++a) {
      for (int s2 = 0; s2 < mdp.states; ++s2) p_pi(s, s2) += pi(s, a) * mdp.prob(s, a, s2);
    }
  }
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(mdp.states, mdp.states) - mdp.gamma * p_pi;
  return lhs.partialPivLu().solve(c_pi);
}

RowMatrix policy_q_linear_solve(const MdpSpec& mdp, const SoftmaxPolicy& policy) {
  const int n = mdp.pairs();
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(n, n) - mdp.gamma * pair_transition(mdp, policy.probability_table());
  return unflatten(lhs.partialPivLu().solve(flatten(mdp.cost)), mdp.states, mdp.actions);
}

Eigen::MatrixXd occupancy_kernel_matrix(const MdpSpec& mdp, const SoftmaxPolicy& policy) {
  const RowMatrix pi = policy.probability_table();
  Eigen::MatrixXd k = mdp.gamma * pair_transition(mdp, pi);
  for (int s2 = 0; s2 < mdp.states; ++s2) {
    for (int a2 = 0; a2 < mdp.actions; ++a2) {
      k.col(mdp.index(s2, a2)).array() += (1.0 - mdp.gamma) * mdp.rho[s2] * pi(s2, a2);
    }
  }
  return k;
}

RowMatrix occupancy_solve(const MdpSpec& mdp, const SoftmaxPolicy& policy) {
  const int n = mdp.pairs();
  // nu^T (I - K) = 0 with one balance equation replaced by sum(nu) = 1.
  Eigen::MatrixXd lhs = (Eigen::MatrixXd::Identity(n, n) - occupancy_kernel_matrix(mdp, policy)).transpose();
  lhs.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  const auto lu = lhs.fullPivLu();
  if (!lu.isInvertible()) throw std::logic_error("occupancy system is singular");
  return unflatten(lu.solve(rhs), mdp.states, mdp.actions);
}

RowMatrix occupancy_series(const MdpSpec& mdp, const SoftmaxPolicy& policy, int horizon) {
  const RowMatrix pi = policy.probability_table();
  const Eigen::MatrixXd step = pair_transition(mdp, pi);
  Eigen::RowVectorXd marginal(mdp.pairs());
  for (int s = 0; s < mdp.states; ++s) {
    for (int a = 0; a < mdp.actions; ++a) marginal[mdp.index(s, a)] = mdp.rho[s] * pi(s, a);
  }
  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(mdp.pairs());
  double weight = 1.0 - mdp.gamma;
  for (int t = 0; t <= horizon; ++t) {
    total += weight * marginal;
    marginal = marginal * step;
    weight *= mdp.gamma;
  }
  return Eigen::Map<const RowMatrix>(total.data(), mdp.states, mdp.actions);
}

RowMatrix occupancy_critic_fixed_point(const MdpSpec& mdp, const SoftmaxPolicy& policy) {
  const int n = mdp.pairs();
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * occupancy_kernel_matrix(mdp, policy);
  return unflatten(lhs.partialPivLu().solve(flatten(mdp.cost)), mdp.states, mdp.actions);
}

double exact_loss(const MdpSpec& mdp, const SoftmaxPolicy& policy) {
  return mdp.rho.dot(policy_state_values(mdp, policy.probability_table()));
}

RowMatrix occupancy_weighted_pg(const MdpSpec& mdp, const SoftmaxPolicy& policy) {
  const RowMatrix nu = occupancy_solve(mdp, policy);
  const RowMatrix q = policy_q_linear_solve(mdp, policy);
  RowMatrix g = RowMatrix::Zero(mdp.states, mdp.actions);
  for (int s = 0; s < mdp.states; ++s) {
    for (int a = 0; a < mdp.actions; ++a) g += nu(s, a) * q(s, a) * policy.score(s, a);
  }
  return g;
}

RowMatrix exact_pg_gradient(const MdpSpec& mdp, const SoftmaxPolicy& policy) {
  const RowMatrix nu = occupancy_solve(mdp, policy);
  const RowMatrix q = value_iteration(mdp, &policy, 1e-13).q;
  const RowMatrix pi = policy.probability_table();
  // Row s of sum_a nu(s,a) Q(s,a) (e_a - pi(.|s)).
  RowMatrix g(mdp.states, mdp.actions);
  for (int s = 0; s < mdp.states; ++s) {
    const Eigen::RowVectorXd w = nu.row(s).cwiseProduct(q.row(s));
    g.row(s) = w - w.sum() * pi.row(s);
  }
  return g / (1.0 - mdp.gamma);
}

RowMatrix finite_difference_pg(const MdpSpec& mdp, const SoftmaxPolicy& policy, double delta) {
  RowMatrix g(mdp.states, mdp.actions);
  RowMatrix logits = policy.logits();
  for (int s = 0; s < mdp.states; ++s) {
    for (int a = 0; a < mdp.actions; ++a) {
      const double saved = logits(s, a);
      logits(s, a) = saved + delta;
      const double up = exact_loss(mdp, SoftmaxPolicy(logits));
      logits(s, a) = saved - delta;
      const double down = exact_loss(mdp, SoftmaxPolicy(logits));
      logits(s, a) = saved;
      g(s, a) = (up - down) / (2.0 * delta);
    }
  }
  return g;
}

OptimalPolicy optimal_loss(const MdpSpec& mdp, double tol) {
  OptimalPolicy out;
  out.q = value_iteration(mdp, nullptr, tol).q;
  out.actions.resize(static_cast<std::size_t>(mdp.states));
  for (int s = 0; s < mdp.states; ++s) out.q.row(s).minCoeff(&out.actions[static_cast<std::size_t>(s)]);
  out.loss = mdp.rho.dot(policy_state_values(mdp, deterministic_policy_table(mdp, out.actions)));
  return out;
}

double scaled_gap(double loss, double optimal) {
  if (!(optimal > 0.0)) throw std::domain_error("scaled gap needs a positive optimal loss");
  return (loss - optimal) / optimal;
}

}  // namespace adasgd::oracles
