#include "adasgd/oracles/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace adasgd::oracles {

BatchMeans::BatchMeans(int batches) {
  if (batches < 2) throw std::invalid_argument("batch means needs at least two batches");
  sums_.assign(static_cast<std::size_t>(batches), 0.0);
  weights_.assign(static_cast<std::size_t>(batches), 0.0);
}

void BatchMeans::add(int batch, double value, double weight) {
  if (batch < 0 || batch >= batches()) throw std::out_of_range("batch index out of range");
  sums_[static_cast<std::size_t>(batch)] += value * weight;
  weights_[static_cast<std::size_t>(batch)] += weight;
}

double BatchMeans::total_weight() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

Estimate BatchMeans::estimate() const {
  const double w = total_weight();
  if (!(w > 0.0)) throw std::logic_error("batch means has no observations");
  Estimate out;
  out.mean = std::accumulate(sums_.begin(), sums_.end(), 0.0) / w;
  int used = 0;
  double ss = 0.0;
  for (std::size_t j = 0; j < sums_.size(); ++j) {
    if (weights_[j] <= 0.0) continue;
    const double r = sums_[j] / weights_[j] - out.mean;
    ss += r * r;
    ++used;
  }
  out.stderr_ = used > 1 ? std::sqrt(ss / (used - 1) / used) : INFINITY;
  return out;
}

Estimate batch_means(std::span<const double> values, int batches) {
  if (values.size() < static_cast<std::size_t>(batches)) {
    throw std::invalid_argument("fewer values than batches");
  }
  BatchMeans bm(batches);
  const auto n = static_cast<std::uint64_t>(values.size());
  for (std::uint64_t t = 0; t < n; ++t) bm.add(batch_of(t, n, batches), values[t]);
  return bm.estimate();
}

double standardized_difference(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.stderr_, b.stderr_);
  const double d = std::abs(a.mean - b.mean);
  if (se == 0.0) return d == 0.0 ? 0.0 : INFINITY;
  return d / se;
}

std::pair<double, double> default_fit_window(std::uint64_t horizon) {
  const double t = static_cast<double>(horizon);
  return {std::max(100.0, t / 100.0), t};
}

RateFit fit_rate(const LossCurve& curve, double t_min, double t_max) {
  if (curve.sample_counts.size() != curve.mean_gap.size()) {
    throw std::invalid_argument("loss curve columns differ in length");
  }
  RateFit fit;
  fit.t_min = t_min;
  fit.t_max = t_max;
  std::vector<double> xs;
  std::vector<double> ys;
  int in_window = 0;
  for (std::size_t i = 0; i < curve.sample_counts.size(); ++i) {
    const double t = static_cast<double>(curve.sample_counts[i]);
    if (t < t_min || t > t_max) continue;
    ++in_window;
    const double gap = curve.mean_gap[i];
    if (!(gap > 0.0) || !std::isfinite(gap)) {
      ++fit.excluded;
      continue;
    }
    xs.push_back(std::log(t));
    ys.push_back(std::log(gap));
  }
  if (in_window < 10) {
    throw std::invalid_argument("rate fit needs at least 10 points in the window, got " + std::to_string(in_window));
  }
  if (fit.excluded * 5 > in_window) {
    throw std::invalid_argument("rate fit excluded " + std::to_string(fit.excluded) + " of " +
                                std::to_string(in_window) + " points with non-positive or non-finite gap");
  }
  fit.points = static_cast<int>(xs.size());
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("rate fit window has a single distinct sample count");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace adasgd::oracles
