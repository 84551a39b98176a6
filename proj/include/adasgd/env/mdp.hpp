#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "adasgd/core/types.hpp"

namespace adasgd::rl {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Finite discounted MDP with costs (lower is better).
struct MdpSpec {
  int states = 1;
  int actions = 1;
  std::vector<double> transition;  ///< P(s'|s,a) at [(s * actions + a) * states + s']
  RowMatrix cost;                  ///< c(s,a), states x actions
  Eigen::VectorXd rho;             ///< initial distribution, strictly positive
  double gamma = 0.8;

  /// Throws std::invalid_argument if any row of P or rho is not a distribution
  /// (tolerance 1e-12), min rho <= 0, or gamma is outside (0, 1).
  void validate() const;

  std::span<const double> next_state_distribution(int s, int a) const {
    return {transition.data() + static_cast<std::size_t>(s * actions + a) * states,
            static_cast<std::size_t>(states)};
  }
  double prob(int s, int a, int next) const { return transition[static_cast<std::size_t>((s * actions + a) * states + next)]; }
  int pairs() const { return states * actions; }
  int index(int s, int a) const { return s * actions + a; }
  /// max |c(s,a)|
  double cost_bound() const;
};

/// P(.|s,a) ~ Dirichlet(1,...,1), c(s,a) ~ U[0,1], rho uniform.
MdpSpec random_mdp(int states, int actions, double gamma, std::uint64_t seed);

void to_json(nlohmann::json& j, const MdpSpec& mdp);
void from_json(const nlohmann::json& j, MdpSpec& mdp);

/// pi(a|s) proportional to exp(theta[s, a]). Logits flatten row-major into ThetaVector.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(int states, int actions);  ///< uniform policy (all logits zero)
  explicit SoftmaxPolicy(RowMatrix logits);
  static SoftmaxPolicy from_theta(const ThetaVector& theta, int states, int actions);

  int states() const { return static_cast<int>(logits_.rows()); }
  int actions() const { return static_cast<int>(logits_.cols()); }
  const RowMatrix& logits() const { return logits_; }
  ThetaVector to_theta() const;

  /// pi(.|s), computed with the max-logit shift.
  Eigen::VectorXd probabilities(int s) const;
  RowMatrix probability_table() const;

  /// grad_theta log pi(a|s): row s equals e_a - pi(.|s), all other rows zero.
  RowMatrix score(int s, int a) const;

 private:
  RowMatrix logits_;
};

/// Inverse-CDF draw from a discrete distribution given u in [0, 1).
int sample_categorical(std::span<const double> probs, double u);
int sample_categorical(const Eigen::VectorXd& probs, double u);

}  // namespace adasgd::rl
