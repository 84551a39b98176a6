#pragma once

#include <cmath>
#include <vector>

#include "adasgd/core/sgd.hpp"
#include "adasgd/env/mdp.hpp"

namespace testing {

using adasgd::GradientSample;
using adasgd::Rng;
using adasgd::ThetaVector;

inline ThetaVector vec(std::initializer_list<double> values) {
  ThetaVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

/// Returns the same gradient every step, whatever theta is.
struct ConstantEnv {
  GradientSample g;
  Eigen::Index dimension() const { return g.size(); }
  void reset(const ThetaVector&, Rng&) {}
  GradientSample sample(const ThetaVector&, Rng&) { return g; }
};

/// Gradients are i.i.d. N(0, 1) draws that ignore theta.
struct NoiseEnv {
  Eigen::Index dim = 1;
  Eigen::Index dimension() const { return dim; }
  void reset(const ThetaVector&, Rng&) {}
  GradientSample sample(const ThetaVector&, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    GradientSample g(dim);
    for (Eigen::Index i = 0; i < dim; ++i) g[i] = normal(rng);
    return g;
  }
};

/// Noisy gradient of (theta - target)^2 / 2 carried by an AR(1) disturbance.
struct QuadraticMarkovEnv {
  double target = 3.0;
  double state = 0.0;
  Eigen::Index dimension() const { return 1; }
  void reset(const ThetaVector&, Rng&) { state = 0.0; }
  GradientSample sample(const ThetaVector& theta, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    state = 0.5 * state + normal(rng);
    return vec({theta[0] - target + state});
  }
};

/// Pushes theta away from the origin by a factor each step.
struct ExplodingEnv {
  Eigen::Index dimension() const { return 1; }
  void reset(const ThetaVector&, Rng&) {}
  GradientSample sample(const ThetaVector& theta, Rng&) { return vec({-1e6 * (std::abs(theta[0]) + 1.0)}); }
};

/// Estimator undefined once theta leaves (0, inf).
struct DomainEnv {
  Eigen::Index dimension() const { return 1; }
  void reset(const ThetaVector&, Rng&) {}
  GradientSample sample(const ThetaVector& theta, Rng&) {
    if (!(theta[0] > 0.0)) throw std::domain_error("theta left the domain");
    return vec({1.0});
  }
};

/// Deterministic MDP whose transitions all go to `next`.
inline adasgd::rl::MdpSpec deterministic_mdp(int states, int actions, double gamma,
                                            const std::vector<double>& costs, int next = 0) {
  adasgd::rl::MdpSpec mdp;
  mdp.states = states;
  mdp.actions = actions;
  mdp.gamma = gamma;
  mdp.transition.assign(static_cast<std::size_t>(states * actions * states), 0.0);
  for (int s = 0; s < states; ++s) {
    for (int a = 0; a < actions; ++a) mdp.transition[static_cast<std::size_t>((s * actions + a) * states + next)] = 1.0;
  }
  mdp.cost = adasgd::rl::RowMatrix(states, actions);
  for (int i = 0; i < states * actions; ++i) mdp.cost.data()[i] = costs[static_cast<std::size_t>(i)];
  mdp.rho = Eigen::VectorXd::Constant(states, 1.0 / states);
  return mdp;
}

}  // namespace testing
