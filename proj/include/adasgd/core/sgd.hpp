#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adasgd/core/projection.hpp"
#include "adasgd/core/step_schedule.hpp"
#include "adasgd/core/types.hpp"

namespace adasgd {

/// Any |theta_i| above this in unprojected mode counts as divergence.
inline constexpr double kDivergenceThreshold = 1e12;

/// An adaptively sampled Markov environment.
///
/// reset() puts the chain in its canonical initial state (it may need theta,
/// e.g. to draw the first action of a policy). sample() performs one transition
/// under theta and returns the gradient estimator evaluated at the new state.
template <class Env>
concept AdaptiveEnvironment = requires(Env& env, const Env& cenv, const ThetaVector& theta, Rng& rng) {
  { cenv.dimension() } -> std::convertible_to<Eigen::Index>;
  env.reset(theta, rng);
  { env.sample(theta, rng) } -> std::convertible_to<GradientSample>;
};

/// Settings for a single replication of the SGD loop.
struct RunConfig {
  std::uint64_t horizon = 1;  ///< total data samples T (not updates)
  std::uint64_t batch = 1;    ///< samples per update B
  std::uint64_t seed = 0;
  std::optional<BoxProjection> projection;  ///< nullopt means Theta = R^m
  bool averaging = false;
  /// Evaluate the schedule at samples consumed (t = kB) rather than the update index k.
  bool step_by_samples = false;
  std::uint64_t replications = 1;
  /// Standard deviation of additive Gaussian noise on each averaged gradient.
  /// Testing hook only; zero reproduces the exact estimator.
  double gradient_noise_sd = 0.0;

  void validate() const;
  std::uint64_t updates() const { return horizon / batch; }
  bool projected() const { return projection.has_value() && !projection->is_unbounded(); }
};

/// Trajectory of one replication, indexed by cumulative samples consumed.
struct RunRecord {
  std::vector<std::uint64_t> sample_index;
  std::vector<ThetaVector> theta;
  std::vector<ThetaVector> theta_bar;  ///< step-size weighted average of past iterates
  std::vector<double> loss_gap;        ///< filled by the caller from an oracle
  std::optional<std::uint64_t> divergence_sample;

  bool diverged() const { return divergence_sample.has_value(); }
  std::size_t size() const { return sample_index.size(); }
};

/// P(theta - eta * g). Without a projection returns theta - eta * g.
ThetaVector sgd_update(const ThetaVector& theta, const GradientSample& g, double eta,
                       const BoxProjection* projection);

/// Incremental step-size weighted average: sum_k eta_k theta_{k-1} / sum_k eta_k.
class WeightedAverage {
 public:
  explicit WeightedAverage(const ThetaVector& theta0) : mean_(theta0) {}

  void add(const ThetaVector& theta, double weight) {
    weight_sum_ += weight;
    mean_ += (weight / weight_sum_) * (theta - mean_);
  }

  const ThetaVector& value() const { return mean_; }
  double weight_sum() const { return weight_sum_; }

 private:
  ThetaVector mean_;
  double weight_sum_ = 0.0;
};

/// Sorted, deduplicated checkpoints in [1, horizon]; always includes horizon.
std::vector<std::uint64_t> normalize_checkpoints(std::span<const std::uint64_t> checkpoints,
                                                 std::uint64_t horizon);

/// Runs SGD on an adaptive environment.
///
/// For each update k the parameter is held fixed for B consecutive transitions;
/// their gradients are averaged and applied with eta_k = step_size(schedule, k).
/// When `checkpoints` is empty every update is recorded, otherwise the state is
/// recorded after exactly c samples for every checkpoint c.
template <AdaptiveEnvironment Env>
RunRecord run_sgd(Env& env, const RunConfig& cfg, const StepSchedule& schedule, const ThetaVector& theta0,
                  std::span<const std::uint64_t> checkpoints = {}) {
  cfg.validate();
  schedule.validate();
  if (theta0.size() != static_cast<Eigen::Index>(env.dimension())) {
    throw std::invalid_argument("theta0 dimension does not match the environment");
  }
  const BoxProjection* box = cfg.projected() ? &*cfg.projection : nullptr;
  if (box != nullptr && box->dimension() != theta0.size()) {
    throw std::invalid_argument("projection dimension does not match theta");
  }

  Rng rng(cfg.seed);
  Rng noise_rng(derive_seed(cfg.seed, 0x6e6f697365ULL));
  std::normal_distribution<double> noise(0.0, 1.0);

  ThetaVector theta = box != nullptr ? box->project(theta0) : theta0;
  WeightedAverage average(theta);
  env.reset(theta, rng);

  RunRecord record;
  const bool every_update = checkpoints.empty();
  const std::vector<std::uint64_t> marks =
      every_update ? std::vector<std::uint64_t>{} : normalize_checkpoints(checkpoints, cfg.horizon);
  std::size_t next_mark = 0;

  auto push = [&](std::uint64_t samples) {
    record.sample_index.push_back(samples);
    record.theta.push_back(theta);
    record.theta_bar.push_back(average.value());
  };

  if (every_update) push(0);

  GradientSample batch_sum = GradientSample::Zero(theta.size());
  std::uint64_t in_batch = 0;
  std::uint64_t k = 0;
  std::uint64_t t = 1;
  for (; t <= cfg.horizon; ++t) {
    GradientSample g;
    try {
      g = env.sample(theta, rng);
    } catch (const std::domain_error&) {
      // Unprojected iterates can leave the region where the estimator is defined.
      if (box != nullptr) throw;
      record.divergence_sample = t;
      break;
    }
    if (box != nullptr && !g.allFinite()) {
      throw std::runtime_error("non-finite gradient sample in projected mode at sample " + std::to_string(t));
    }
    batch_sum += g;
    ++in_batch;

    if (in_batch == cfg.batch) {
      ++k;
      GradientSample mean_g = batch_sum / static_cast<double>(cfg.batch);
      if (cfg.gradient_noise_sd > 0.0) {
        for (Eigen::Index i = 0; i < mean_g.size(); ++i) mean_g[i] += cfg.gradient_noise_sd * noise(noise_rng);
      }
      const double eta = step_size(schedule, cfg.step_by_samples ? t : k);
      ThetaVector next = sgd_update(theta, mean_g, eta, box);
      if (box == nullptr && (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceThreshold)) {
        record.divergence_sample = t;
        break;
      }
      average.add(theta, eta);
      theta = std::move(next);
      batch_sum.setZero();
      in_batch = 0;
      if (every_update) push(t);
    }
    while (!every_update && next_mark < marks.size() && marks[next_mark] == t) {
      push(t);
      ++next_mark;
    }
  }
  // A diverged run keeps its last finite state for the remaining checkpoints.
  for (; next_mark < marks.size(); ++next_mark) push(marks[next_mark]);
  return record;
}

}  // namespace adasgd
