#include <doctest.h>

#include <cmath>

#include "pdd/log_domain.hpp"
#include "pdd/speckle.hpp"

using namespace pdd;

TEST_CASE("speckle is multiplicative, unit mean, variance 1/L") {
  const Raster clean = Raster::constant(256, 256, 100.0, Domain::Intensity);
  for (int looks : {1, 4}) {
    const Raster noisy = simulate_speckle(clean, {Looks(looks), 42});
    const ImageArray ratio = noisy.array() / 100.0;
    const double mean = ratio.mean();
    const double variance = (ratio - mean).square().mean();
    // 65536 samples: SE(mean) = 1/(sqrt(L) * 256) <= 0.0039
    CHECK(std::abs(mean - 1.0) < 0.02);
    CHECK(std::abs(variance - 1.0 / looks) < 0.05 / looks);
  }
}

TEST_CASE("zero input stays zero under speckle") {
  const Raster clean = Raster::constant(16, 16, 0.0, Domain::Intensity);
  const Raster noisy = simulate_speckle(clean, {Looks(1), 3});
  CHECK(noisy.array().maxCoeff() == 0.0);
}

TEST_CASE("speckle simulation is seed-deterministic") {
  const Raster clean = Raster::constant(32, 32, 10.0, Domain::Intensity);
  const Raster a = simulate_speckle(clean, {Looks(2), 9});
  const Raster b = simulate_speckle(clean, {Looks(2), 9});
  const Raster c = simulate_speckle(clean, {Looks(2), 10});
  CHECK((a.array() - b.array()).abs().maxCoeff() == 0.0);
  CHECK((a.array() - c.array()).abs().maxCoeff() > 0.0);
}

TEST_CASE("rows draw from independent streams") {
  // If rows shared one stream, swapping row count would shift every later
  // row; with per-row streams the first rows agree between differently
  // sized simulations.
  ImageArray tall(4, 8), small(2, 8);
  tall.setConstant(5.0);
  small.setConstant(5.0);
  const Raster a = simulate_speckle(Raster(tall, Domain::Intensity), {Looks(1), 77});
  const Raster b = simulate_speckle(Raster(small, Domain::Intensity), {Looks(1), 77});
  CHECK((a.array().topRows(2) - b.array()).abs().maxCoeff() == 0.0);
}

TEST_CASE("log residual of simulated speckle has the trigamma variance") {
  const Raster clean = Raster::constant(512, 512, 50.0, Domain::Intensity);
  for (int looks : {1, 4}) {
    const Raster noisy = simulate_speckle(clean, {Looks(looks), 1234});
    const ImageArray z = (noisy.array().max(1e-12) / 50.0).log();
    const double mean = z.mean();
    const double variance = (z - mean).square().mean();
    // 262144 samples: SE(mean) <= 2.6e-3, SE(variance) <= 7e-3
    CHECK(std::abs(mean - log_speckle_bias(Looks(looks))) < 1e-2);
    CHECK(std::abs(variance - log_speckle_variance(Looks(looks))) < 3e-2);
  }
}

TEST_CASE("multiplicative residual recovers the speckle field") {
  ImageArray clean(128, 128);
  for (Index r = 0; r < 128; ++r)
    for (Index c = 0; c < 128; ++c) clean(r, c) = 20.0 + r + 2.0 * c;
  const Raster reference(clean, Domain::Intensity);
  const Raster noisy = simulate_speckle(reference, {Looks(3), 5});
  const Raster residual = multiplicative_residual(noisy, reference, 1e-9);
  const double mean = residual.mean();
  const double variance = (residual.array() - mean).square().mean();
  // 16384 samples of a shape-3 gamma: SE(mean) <= 4.6e-3
  CHECK(std::abs(mean - 1.0) < 0.02);
  CHECK(std::abs(variance - 1.0 / 3.0) < 0.03);
}

TEST_CASE("multiplicative residual guards the denominator") {
  const Raster noisy = Raster::constant(2, 2, 1.0, Domain::Intensity);
  const Raster zeros = Raster::constant(2, 2, 0.0, Domain::Intensity);
  const Raster r = multiplicative_residual(noisy, zeros, 1e-3);
  CHECK(r(0, 0) == doctest::Approx(1000.0));
  CHECK_THROWS_AS(multiplicative_residual(noisy, zeros, 0.0), ValidationError);
  const Raster wide = Raster::constant(2, 3, 1.0, Domain::Intensity);
  CHECK_THROWS_AS(multiplicative_residual(noisy, wide, 1e-3), ValidationError);
}

TEST_CASE("simulate_speckle requires an intensity raster") {
  const Raster log_image = Raster::constant(4, 4, 0.0, Domain::Log);
  CHECK_THROWS_AS(simulate_speckle(log_image, {Looks(1), 0}), ValidationError);
}
