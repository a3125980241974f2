#pragma once

#include "tessera/transforms.hpp"
#include "tessera/types.hpp"

#include <cstdint>
#include <functional>

namespace tessera::oracle {

/// Binary limit state on physical coordinates; true means failure.
using BinaryLsf = std::function<bool(const Vector&)>;

struct Result {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
};

/// Crude Monte Carlo estimate of the failure probability.
Result mc_pf(const BinaryLsf& lsf, const transforms::ProbabilitySpace& space, std::uint64_t n,
             std::uint64_t seed);

/// Importance sampling with the mean-centered scaled density N(0, scale^2 I)
/// in the standard Gaussian space; weights are the density ratio. scale = 1
/// reproduces mc_pf exactly on the same seed path.
Result is_pf(const BinaryLsf& lsf, const transforms::ProbabilitySpace& space, std::uint64_t n,
             double scale, std::uint64_t seed);

} // namespace tessera::oracle
