#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace adasgd {

/// Decision parameter. Dimension is fixed for the lifetime of a run.
using ThetaVector = Eigen::VectorXd;

/// One (possibly batch-averaged) stochastic gradient, same dimension as theta.
using GradientSample = Eigen::VectorXd;

/// Engine used by every simulator. Each replication owns one instance.
using Rng = std::mt19937_64;

/// Splits (base_seed, stream) into an independent 64-bit seed (splitmix64 finalizer).
/// Adding streams never changes the seeds of earlier ones.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream);

}  // namespace adasgd
