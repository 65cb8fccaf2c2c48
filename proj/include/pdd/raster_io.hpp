#pragma once

#include <string>

#include "pdd/raster.hpp"

namespace pdd {

// Binary PGM (P5), 8-bit or 16-bit big-endian samples. Writing requires an
// intensity raster; samples are rounded and clamped to [0, maxval].
Raster load_pgm(const std::string& path);
void save_pgm(const Raster& raster, const std::string& path, int maxval = 255);

// Raw float format: 4-byte magic "PDDF", then width, height and a domain tag
// (0 = intensity, 1 = log) as little-endian uint32, then row-major float32
// little-endian samples. The only format that round-trips log rasters.
Raster load_raw(const std::string& path);
void save_raw(const Raster& raster, const std::string& path);

// Sniffs the magic bytes ("P5" vs "PDDF") and dispatches.
Raster load_raster(const std::string& path);

// Dispatches on extension: ".pgm" writes PGM (8-bit), anything else raw.
void save_raster(const Raster& raster, const std::string& path);

} // namespace pdd
