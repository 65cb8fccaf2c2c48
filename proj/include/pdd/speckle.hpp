#pragma once

#include <cstdint>
#include <random>

#include "pdd/raster.hpp"

namespace pdd {
namespace rng {

// Stream identifier for run metadata.
inline constexpr const char* kAlgorithm = "mt19937_64/splitmix-streams";

// Derives a well-separated stream seed from (seed, stream) so per-row and
// per-group generators are independent of scheduling. splitmix64 finalizer.
std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) using the top 53 bits of one engine draw.
double unit_uniform(std::mt19937_64& engine);

// Unit-mean exponential via inversion: -ln(1 - U).
double unit_exponential(std::mt19937_64& engine);

// Unit-mean L-look speckle sample: mean of `looks` unit exponentials
// (gamma with shape L, scale 1/L). Variance is 1/L.
double multilook_speckle(std::mt19937_64& engine, int looks);

} // namespace rng

struct SpeckleParams {
  Looks looks{1};
  std::uint64_t seed = 0;
};

// Multiplies a clean intensity raster by simulated speckle. Each image row
// gets its own generator seeded from mix(seed, row), so results are
// reproducible and independent of any parallel row order.
Raster simulate_speckle(const Raster& clean, const SpeckleParams& params);

// Pointwise ratio noisy / max(estimate, floor_value). Useful for checking
// that the removed component looks like pure speckle.
Raster multiplicative_residual(const Raster& noisy, const Raster& estimate,
                               double floor_value);

} // namespace pdd
