#include "pdd/raster.hpp"

namespace pdd {

Raster::Raster(ImageArray values, Domain domain)
    : values_(std::move(values)), domain_(domain) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw ValidationError("raster: empty image");
  if (!values_.allFinite())
    throw ValidationError("raster: non-finite sample");
  if (domain_ == Domain::Intensity && (values_ < 0.0).any())
    throw ValidationError("raster: negative sample in intensity image");
}

Raster Raster::constant(Index height, Index width, double value, Domain domain) {
  return Raster(ImageArray::Constant(height, width, value), domain);
}

} // namespace pdd
