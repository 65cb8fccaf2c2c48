#pragma once

#include "pdd/errors.hpp"
#include "pdd/types.hpp"

namespace pdd {

// Which space the samples live in. Intensity rasters are nonnegative;
// log rasters are unconstrained reals. Both must be finite everywhere.
enum class Domain { Intensity, Log };

// Number of independent looks averaged into a SAR intensity image.
// Validated at construction so downstream code can trust count >= 1.
struct Looks {
  int count;

  explicit Looks(int c) : count(c) {
    if (c < 1) throw ValidationError("looks: count must be >= 1, got " + std::to_string(c));
  }
};

// Immutable 2-D image. All pixel mutation happens on plain ImageArray
// buffers; a Raster is only formed once the samples are final, which keeps
// sharing across worker threads safe without locks.
class Raster {
public:
  Raster(ImageArray values, Domain domain);

  static Raster constant(Index height, Index width, double value, Domain domain);

  Index height() const { return values_.rows(); }
  Index width() const { return values_.cols(); }
  Index size() const { return values_.size(); }
  Domain domain() const { return domain_; }

  const ImageArray& array() const { return values_; }
  double operator()(Index row, Index col) const { return values_(row, col); }
  double mean() const { return values_.mean(); }

private:
  ImageArray values_;
  Domain domain_;
};

} // namespace pdd
