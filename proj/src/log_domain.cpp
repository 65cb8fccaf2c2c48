#include "pdd/log_domain.hpp"

#include <cmath>

namespace pdd {
namespace {

// Euler-Mascheroni constant, enough digits for double.
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kPi = 3.14159265358979323846;

void require_intensity(const Raster& image, const char* op) {
  if (image.domain() != Domain::Intensity)
    throw ValidationError(std::string(op) + ": expected an intensity raster");
}

} // namespace

Raster log_transform(const Raster& intensity, double floor_value) {
  require_intensity(intensity, "log_transform");
  if (!(floor_value > 0.0))
    throw ValidationError("log_transform: floor must be positive");
  ImageArray out = intensity.array().max(floor_value).log();
  return Raster(std::move(out), Domain::Log);
}

Raster exp_transform(const Raster& log_image) {
  if (log_image.domain() != Domain::Log)
    throw ValidationError("exp_transform: expected a log raster");
  ImageArray out = log_image.array().exp();
  return Raster(std::move(out), Domain::Intensity);
}

Raster add_scalar(const Raster& image, double delta) {
  ImageArray out = image.array() + delta;
  return Raster(std::move(out), image.domain());
}

double default_floor(const Raster& intensity, double floor_scale) {
  require_intensity(intensity, "default_floor");
  if (!(floor_scale > 0.0))
    throw ValidationError("default_floor: floor_scale must be positive");
  const double scaled = floor_scale * intensity.mean();
  return scaled > 0.0 ? scaled : floor_scale;
}

double digamma_integer(int n) {
  if (n < 1) throw ValidationError("digamma_integer: n must be >= 1");
  // psi(n) = -gamma + H_{n-1}
  double h = 0.0;
  for (int k = 1; k < n; ++k) h += 1.0 / k;
  return -kEulerGamma + h;
}

double trigamma_integer(int n) {
  if (n < 1) throw ValidationError("trigamma_integer: n must be >= 1");
  // psi'(n) = pi^2/6 - sum_{k<n} 1/k^2
  double s = 0.0;
  for (int k = 1; k < n; ++k) s += 1.0 / (static_cast<double>(k) * k);
  return kPi * kPi / 6.0 - s;
}

double log_speckle_bias(Looks looks) {
  return digamma_integer(looks.count) - std::log(static_cast<double>(looks.count));
}

double log_speckle_variance(Looks looks) { return trigamma_integer(looks.count); }

} // namespace pdd
