#pragma once

#include <functional>
#include <vector>

#include "pdd/config.hpp"
#include "pdd/pdd.hpp"
#include "pdd/raster.hpp"

namespace pdd {

struct DespeckleOptions {
  int workers = 1;
  bool collect_diagnostics = false;
  // Invoked from worker threads with (groups done, groups total); must be
  // thread-safe. Leave empty for no progress reporting.
  std::function<void(Index, Index)> progress;
};

struct StageTimings {
  double transform_ms = 0.0; // log transform + bias shift + search context
  double groups_ms = 0.0;    // grouping, learning and reconstruction
  double finalize_ms = 0.0;  // aggregation finalize + exp transform
};

struct DespeckleResult {
  Raster output; // intensity domain
  std::vector<GroupDiagnostics> diagnostics; // group order; empty unless requested
  StageTimings timings;
  Index groups = 0;
};

// The whole chain: clamp + log transform, subtract the speckle log-bias,
// group/learn/reconstruct patch stacks, aggregate overlaps, exponentiate.
// Group work is split over `workers` threads; per-group seeds are derived
// from config.seed and the group index, so the pixels are identical for any
// worker count (up to the order of the final weighted sums) and bit-equal
// for equal worker counts.
DespeckleResult despeckle_image(const Raster& noisy, const DenoiseConfig& config,
                                const DespeckleOptions& options = {});

} // namespace pdd
