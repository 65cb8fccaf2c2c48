#pragma once

#include "pdd/raster.hpp"

namespace pdd {

// Natural log of an intensity raster, clamping samples below floor_value
// first so zeros stay finite. floor_value must be positive.
Raster log_transform(const Raster& intensity, double floor_value);

// Inverse of log_transform (no clamping on the way back).
Raster exp_transform(const Raster& log_image);

// Adds a scalar to every sample, keeping the domain.
Raster add_scalar(const Raster& image, double delta);

// Default clamp floor: floor_scale * mean(image), falling back to
// floor_scale itself when the mean is not positive.
double default_floor(const Raster& intensity, double floor_scale);

// psi(n) and psi'(n) at positive integers, via the harmonic-sum identities.
double digamma_integer(int n);
double trigamma_integer(int n);

// Mean of the log of unit-mean L-look speckle: psi(L) - ln L. Negative for
// every finite L, approaching 0 as L grows.
double log_speckle_bias(Looks looks);

// Variance of the log of L-look speckle: psi'(L).
double log_speckle_variance(Looks looks);

} // namespace pdd
