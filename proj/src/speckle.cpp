#include "pdd/speckle.hpp"

#include <cmath>

namespace pdd {
namespace rng {

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words; cheap and well spread.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double unit_exponential(std::mt19937_64& engine) {
  // Inversion; 1 - U is in (0, 1], so the log is finite.
  return -std::log(1.0 - unit_uniform(engine));
}

double multilook_speckle(std::mt19937_64& engine, int looks) {
  double sum = 0.0;
  for (int k = 0; k < looks; ++k) sum += unit_exponential(engine);
  return sum / looks;
}

} // namespace rng

Raster simulate_speckle(const Raster& clean, const SpeckleParams& params) {
  if (clean.domain() != Domain::Intensity)
    throw ValidationError("simulate_speckle: expected an intensity raster");
  const Index h = clean.height(), w = clean.width();
  ImageArray out(h, w);
  for (Index r = 0; r < h; ++r) {
    // One generator per row keeps the draws independent of any traversal
    // or threading order.
    std::mt19937_64 engine(rng::mix(params.seed, static_cast<std::uint64_t>(r)));
    for (Index c = 0; c < w; ++c)
      out(r, c) = clean(r, c) * rng::multilook_speckle(engine, params.looks.count);
  }
  return Raster(std::move(out), Domain::Intensity);
}

Raster multiplicative_residual(const Raster& noisy, const Raster& estimate,
                               double floor_value) {
  if (noisy.domain() != Domain::Intensity || estimate.domain() != Domain::Intensity)
    throw ValidationError("multiplicative_residual: expected intensity rasters");
  if (noisy.height() != estimate.height() || noisy.width() != estimate.width())
    throw ValidationError("multiplicative_residual: size mismatch");
  if (!(floor_value > 0.0))
    throw ValidationError("multiplicative_residual: floor must be positive");
  ImageArray out = noisy.array() / estimate.array().max(floor_value);
  return Raster(std::move(out), Domain::Intensity);
}

} // namespace pdd
