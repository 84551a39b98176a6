#include "adasgd/core/sgd.hpp"

namespace adasgd {

void RunConfig::validate() const {
  if (batch == 0) throw std::invalid_argument("batch size must be positive");
  if (horizon < batch) throw std::invalid_argument("horizon must be at least the batch size");
  if (replications == 0) throw std::invalid_argument("replications must be positive");
  if (!(gradient_noise_sd >= 0.0)) throw std::invalid_argument("gradient noise sd must be non-negative");
}

ThetaVector sgd_update(const ThetaVector& theta, const GradientSample& g, double eta,
                       const BoxProjection* projection) {
  if (theta.size() != g.size()) throw std::invalid_argument("gradient dimension mismatch");
  ThetaVector next = theta - eta * g;
  if (projection != nullptr) return projection->project(next);
  return next;
}

std::vector<std::uint64_t> normalize_checkpoints(std::span<const std::uint64_t> checkpoints,
                                                 std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  out.reserve(checkpoints.size() + 1);
  for (auto c : checkpoints) {
    if (c >= 1 && c <= horizon) out.push_back(c);
  }
  out.push_back(horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace adasgd
