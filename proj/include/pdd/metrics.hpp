#pragma once

#include "pdd/raster.hpp"

namespace pdd {

// Axis-aligned rectangle in pixel coordinates, x to the right, y down.
struct RegionSpec {
  Index x = 0;
  Index y = 0;
  Index width = 0;
  Index height = 0;

  void validate(Index image_height, Index image_width) const;
  Index area() const { return width * height; }
};

// Peak signal-to-noise ratio in dB against the given peak (default 255).
// Identical images give +infinity. Intensity rasters of equal size only.
double psnr(const Raster& reference, const Raster& test, double peak = 255.0);

// Mean structural similarity over all valid 11x11 windows, Gaussian
// weighting (sigma 1.5), stabilization constants (0.01 R)^2 and (0.03 R)^2.
// Requires both sides of the image to be at least the window size.
double ssim(const Raster& reference, const Raster& test, double dynamic_range = 255.0);

// Equivalent number of looks over a nominally homogeneous region:
// mean^2 / population variance. Zero variance yields +infinity (with a
// warning on stderr); region must lie inside the image and cover >= 16 px.
double enl(const Raster& image, const RegionSpec& region);

} // namespace pdd
