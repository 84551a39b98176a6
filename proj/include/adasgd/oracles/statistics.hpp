#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace adasgd::oracles {

inline constexpr int kDefaultBatches = 50;

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Batch-means estimator for long-run averages of an autocorrelated sequence.
///
/// Values are added with the index of the batch they fall in; weighted values
/// give the ratio estimator sum(x) / sum(w), used for conditional averages.
/// The standard error is the spread of the per-batch ratios over sqrt(batches).
class BatchMeans {
 public:
  explicit BatchMeans(int batches = kDefaultBatches);

  void add(int batch, double value, double weight = 1.0);
  Estimate estimate() const;
  int batches() const { return static_cast<int>(sums_.size()); }
  double total_weight() const;

 private:
  std::vector<double> sums_;
  std::vector<double> weights_;
};

/// Batch index of step t (0-based) out of n when split into equal consecutive batches.
inline int batch_of(std::uint64_t t, std::uint64_t n, int batches = kDefaultBatches) {
  return static_cast<int>((t * static_cast<std::uint64_t>(batches)) / n);
}

/// Batch-means mean and standard error of a stored sequence.
Estimate batch_means(std::span<const double> values, int batches = kDefaultBatches);

/// |a - b| / sqrt(se_a^2 + se_b^2).
double standardized_difference(const Estimate& a, const Estimate& b);

/// Mean optimality gap across replications at each checkpoint.
struct LossCurve {
  std::vector<std::uint64_t> sample_counts;
  std::vector<double> mean_gap;
  std::vector<double> stderr_;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double r_squared = 0.0;
  int points = 0;    ///< points used in the regression
  int excluded = 0;  ///< non-positive gaps dropped from the window
};

/// Last two decades of the sample axis, never below 100 samples.
std::pair<double, double> default_fit_window(std::uint64_t horizon);

/// OLS of log(mean_gap) on log(samples) restricted to [t_min, t_max].
/// Non-positive gaps are excluded and counted; throws std::invalid_argument with
/// fewer than 10 points in the window or more than 20% excluded.
RateFit fit_rate(const LossCurve& curve, double t_min, double t_max);

}  // namespace adasgd::oracles
