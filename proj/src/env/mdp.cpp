#include "adasgd/env/mdp.hpp"

#include <cmath>
#include <stdexcept>


namespace adasgd::rl {

void MdpSpec::validate() const {
  if (states < 1 || actions < 1) throw std::invalid_argument("MDP needs at least one state and one action");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("MDP discount must lie in (0, 1)");
  if (transition.size() != static_cast<std::size_t>(states * actions * states)) {
    throw std::invalid_argument("MDP transition tensor has the wrong size");
  }
  if (cost.rows() != states || cost.cols() != actions) throw std::invalid_argument("MDP cost table has the wrong shape");
  if (rho.size() != states) throw std::invalid_argument("MDP initial distribution has the wrong size");
  if (!cost.allFinite()) throw std::invalid_argument("MDP costs must be finite");
  for (int s = 0; s < states; ++s) {
    for (int a = 0; a < actions; ++a) {
      double total = 0.0;
      for (double p : next_state_distribution(s, a)) {
        if (!(p >= 0.0)) throw std::invalid_argument("MDP transition probabilities must be non-negative");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("MDP transition row does not sum to one");
    }
  }
  if (!(rho.minCoeff() > 0.0)) throw std::invalid_argument("MDP initial distribution must be strictly positive");
  if (std::abs(rho.sum() - 1.0) > 1e-12) throw std::invalid_argument("MDP initial distribution does not sum to one");
}

double MdpSpec::cost_bound() const { return cost.cwiseAbs().maxCoeff(); }

MdpSpec random_mdp(int states, int actions, double gamma, std::uint64_t seed) {
  Rng rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MdpSpec mdp;
  mdp.states = states;
  mdp.actions = actions;
  mdp.gamma = gamma;
  mdp.transition.resize(static_cast<std::size_t>(states * actions * states));
  for (int sa = 0; sa < states * actions; ++sa) {
    // Normalized Exp(1) draws give a Dirichlet(1, ..., 1) row.
    double total = 0.0;
    auto* row = mdp.transition.data() + static_cast<std::size_t>(sa) * states;
    for (int k = 0; k < states; ++k) total += (row[k] = exp1(rng));
    for (int k = 0; k < states; ++k) row[k] /= total;
  }
  mdp.cost.resize(states, actions);
  for (int s = 0; s < states; ++s) {
    for (int a = 0; a < actions; ++a) mdp.cost(s, a) = unit(rng);
  }
  mdp.rho = Eigen::VectorXd::Constant(states, 1.0 / states);
  return mdp;
}

void to_json(nlohmann::json& j, const MdpSpec& mdp) {
  nlohmann::json p = nlohmann::json::array();
  nlohmann::json c = nlohmann::json::array();
  for (int s = 0; s < mdp.states; ++s) {
    nlohmann::json ps = nlohmann::json::array();
    nlohmann::json cs = nlohmann::json::array();
    for (int a = 0; a < mdp.actions; ++a) {
      auto row = mdp.next_state_distribution(s, a);
      ps.push_back(std::vector<double>(row.begin(), row.end()));
      cs.push_back(mdp.cost(s, a));
    }
    p.push_back(std::move(ps));
    c.push_back(std::move(cs));
  }
  j = nlohmann::json{{"states", mdp.states},
                     {"actions", mdp.actions},
                     {"gamma", mdp.gamma},
                     {"transition", std::move(p)},
                     {"cost", std::move(c)},
                     {"rho", std::vector<double>(mdp.rho.data(), mdp.rho.data() + mdp.rho.size())}};
}

void from_json(const nlohmann::json& j, MdpSpec& mdp) {
  mdp.states = j.at("states").get<int>();
  mdp.actions = j.at("actions").get<int>();
  mdp.gamma = j.at("gamma").get<double>();
  const auto& p = j.at("transition");
  const auto& c = j.at("cost");
  if (p.size() != static_cast<std::size_t>(mdp.states) || c.size() != static_cast<std::size_t>(mdp.states)) {
    throw std::invalid_argument("MDP document: transition/cost outer dimension must equal states");
  }
  mdp.transition.assign(static_cast<std::size_t>(mdp.states * mdp.actions * mdp.states), 0.0);
  mdp.cost.resize(mdp.states, mdp.actions);
  for (int s = 0; s < mdp.states; ++s) {
    if (p[s].size() != static_cast<std::size_t>(mdp.actions) || c[s].size() != static_cast<std::size_t>(mdp.actions)) {
      throw std::invalid_argument("MDP document: inner dimension must equal actions");
    }
    for (int a = 0; a < mdp.actions; ++a) {
      const auto row = p[s][a].get<std::vector<double>>();
      if (row.size() != static_cast<std::size_t>(mdp.states)) {
        throw std::invalid_argument("MDP document: transition rows must have one entry per state");
      }
      std::copy(row.begin(), row.end(), mdp.transition.begin() + static_cast<std::ptrdiff_t>(mdp.index(s, a) * mdp.states));
      mdp.cost(s, a) = c[s][a].get<double>();
    }
  }
  const auto rho = j.at("rho").get<std::vector<double>>();
  mdp.rho = Eigen::Map<const Eigen::VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size()));
  mdp.validate();
}

SoftmaxPolicy::SoftmaxPolicy(int states, int actions) : logits_(RowMatrix::Zero(states, actions)) {}

SoftmaxPolicy::SoftmaxPolicy(RowMatrix logits) : logits_(std::move(logits)) {
  if (logits_.size() == 0) throw std::invalid_argument("softmax policy needs a non-empty logit table");
}

SoftmaxPolicy SoftmaxPolicy::from_theta(const ThetaVector& theta, int states, int actions) {
  if (theta.size() != static_cast<Eigen::Index>(states) * actions) {
    throw std::invalid_argument("theta size does not match states x actions");
  }
  return SoftmaxPolicy(Eigen::Map<const RowMatrix>(theta.data(), states, actions));
}

ThetaVector SoftmaxPolicy::to_theta() const { return Eigen::Map<const ThetaVector>(logits_.data(), logits_.size()); }

Eigen::VectorXd SoftmaxPolicy::probabilities(int s) const {
  const auto row = logits_.row(s);
  Eigen::VectorXd p = (row.array() - row.maxCoeff()).exp().transpose();
  return p / p.sum();
}

RowMatrix SoftmaxPolicy::probability_table() const {
  RowMatrix table(logits_.rows(), logits_.cols());
  for (int s = 0; s < states(); ++s) table.row(s) = probabilities(s).transpose();
  return table;
}

RowMatrix SoftmaxPolicy::score(int s, int a) const {
  RowMatrix g = RowMatrix::Zero(logits_.rows(), logits_.cols());
  g.row(s) = -probabilities(s).transpose();
  g(s, a) += 1.0;
  return g;
}

int sample_categorical(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int sample_categorical(const Eigen::VectorXd& probs, double u) {
  return sample_categorical(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.size())), u);
}

}  // namespace adasgd::rl
