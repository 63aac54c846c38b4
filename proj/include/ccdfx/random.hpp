#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ccdfx {

using Rng = std::mt19937_64;

/// Engine for one (seed, stream) pair. Streams are decorrelated by a
/// splitmix64 finalizer so nearby seeds do not share state.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

Eigen::VectorXd standard_normal_vector(Eigen::Index n, Rng& rng);

/// Uniform on the open interval (0, 1).
double uniform_open(Rng& rng);

}  // namespace ccdfx
