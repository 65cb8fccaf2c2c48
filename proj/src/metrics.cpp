#include "pdd/metrics.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace pdd {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

void require_pair(const Raster& a, const Raster& b, const char* op) {
  if (a.domain() != Domain::Intensity || b.domain() != Domain::Intensity)
    throw ValidationError(std::string(op) + ": expected intensity rasters");
  if (a.height() != b.height() || a.width() != b.width())
    throw ValidationError(std::string(op) + ": size mismatch");
}

// Normalized 1-D Gaussian taps; the 2-D window is the outer product.
Eigen::Array<double, kWindow, 1> gaussian_taps() {
  Eigen::Array<double, kWindow, 1> g;
  const int mid = kWindow / 2;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - mid;
    g[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
  }
  return g / g.sum();
}

// Valid-mode separable Gaussian filter: output is (H-10) x (W-10).
ImageArray window_means(const ImageArray& plane,
                        const Eigen::Array<double, kWindow, 1>& taps) {
  const Index h = plane.rows(), w = plane.cols();
  ImageArray horizontal(h, w - kWindow + 1);
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c + kWindow <= w; ++c) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += taps[i] * plane(r, c + i);
      horizontal(r, c) = acc;
    }
  ImageArray out(h - kWindow + 1, w - kWindow + 1);
  for (Index r = 0; r + kWindow <= h; ++r)
    for (Index c = 0; c < out.cols(); ++c) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += taps[i] * horizontal(r + i, c);
      out(r, c) = acc;
    }
  return out;
}

} // namespace

void RegionSpec::validate(Index image_height, Index image_width) const {
  if (width < 1 || height < 1)
    throw ValidationError("region: width and height must be >= 1");
  if (x < 0 || y < 0 || x + width > image_width || y + height > image_height)
    throw ValidationError("region: outside image bounds");
  if (area() < 16)
    throw ValidationError("region: need at least 16 pixels for a stable "
                          "moment estimate");
}

double psnr(const Raster& reference, const Raster& test, double peak) {
  require_pair(reference, test, "psnr");
  if (!(peak > 0.0)) throw ValidationError("psnr: peak must be positive");
  const double mse = (reference.array() - test.array()).square().mean();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Raster& reference, const Raster& test, double dynamic_range) {
  require_pair(reference, test, "ssim");
  if (!(dynamic_range > 0.0))
    throw ValidationError("ssim: dynamic range must be positive");
  if (reference.height() < kWindow || reference.width() < kWindow)
    throw ValidationError("ssim: image smaller than the 11x11 window");

  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  const auto taps = gaussian_taps();

  const ImageArray& x = reference.array();
  const ImageArray& y = test.array();
  const ImageArray mu_x = window_means(x, taps);
  const ImageArray mu_y = window_means(y, taps);
  const ImageArray xx = window_means(x * x, taps);
  const ImageArray yy = window_means(y * y, taps);
  const ImageArray xy = window_means(x * y, taps);

  const ImageArray var_x = xx - mu_x * mu_x;
  const ImageArray var_y = yy - mu_y * mu_y;
  const ImageArray cov = xy - mu_x * mu_y;

  const ImageArray numerator = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2);
  const ImageArray denominator =
      (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2);
  return (numerator / denominator).mean();
}

double enl(const Raster& image, const RegionSpec& region) {
  if (image.domain() != Domain::Intensity)
    throw ValidationError("enl: expected an intensity raster");
  region.validate(image.height(), image.width());

  const auto block =
      image.array().block(region.y, region.x, region.height, region.width);
  const double mean = block.mean();
  const double variance = (block - mean).square().mean(); // population
  if (variance == 0.0) {
    std::cerr << "enl: zero-variance region, reporting +inf\n";
    return std::numeric_limits<double>::infinity();
  }
  return mean * mean / variance;
}

} // namespace pdd
