#pragma once

#include <vector>

#include "pdd/raster.hpp"

namespace pdd {

// Patch extraction / search geometry shared by grouping and the pipeline.
struct PatchGeometry {
  int patch_side = 7;
  int search_radius = 40;
  int stride = 3;
  int group_size = 90;

  int patch_size() const { return patch_side * patch_side; }
  void validate() const;
};

struct PatchOrigin {
  Index row = 0;
  Index col = 0;
};

inline bool operator==(PatchOrigin a, PatchOrigin b) {
  return a.row == b.row && a.col == b.col;
}

// A stack of similar patches. Column 0 of data is always the reference
// patch; the rest are the best matches in ascending distance order, ties
// broken by row-major origin order. distances[j] belongs to column j.
struct PatchGroup {
  Matrix data;                      // patch_size x members
  std::vector<PatchOrigin> origins; // one per column
  std::vector<double> distances;    // ascending, [0] = self-distance
  int requested_size = 0;
  bool truncated = false;           // fewer candidates than requested

  Index members() const { return data.cols(); }
};

// Patch vectorized in row-major scan order.
Vector extract_patch(const ImageArray& image, PatchOrigin origin, int side);

// Similarity between two log-domain patches under L-look speckle:
// (2L-1) * sum_k ln(sqrt(Ai/Aj) + sqrt(Aj/Ai)) with A = exp(z) clamped
// away from zero. Symmetric; equals (2L-1)*N*ln 2 when the patches match.
double patch_distance(const Vector& zi, const Vector& zj, Looks looks);

// Precomputed sqrt-intensity plane so repeated searches over one image pay
// the exponentials once. Immutable, safe to share across threads.
class SearchContext {
public:
  explicit SearchContext(const Raster& log_image);

  const Raster& image() const { return image_; }
  const ImageArray& sqrt_intensity() const { return sqrt_intensity_; }

private:
  Raster image_;
  ImageArray sqrt_intensity_;
};

// Collects the group for one reference patch by exhaustive scan of the
// search window (clipped to valid origins). The reference always lands in
// column 0, even when another candidate ties its distance exactly.
PatchGroup find_similar(const SearchContext& context, PatchOrigin reference,
                        const PatchGeometry& geometry, Looks looks);

PatchGroup find_similar(const Raster& log_image, PatchOrigin reference,
                        const PatchGeometry& geometry, Looks looks);

// Reference origins on a stride grid, plus the final row/column offset so
// every pixel is covered by at least one reference patch. Row-major order.
std::vector<PatchOrigin> reference_origins(Index height, Index width,
                                           const PatchGeometry& geometry);

} // namespace pdd
