#include "pdd/grouping.hpp"

#include <algorithm>
#include <cmath>

namespace pdd {
namespace {

// Intensities are clamped here before ratios so patches containing zeros
// stay finite. Well below any plausible clamp floor used upstream.
constexpr double kIntensityFloor = 1e-30;

// Flush the running product to the log accumulator before it can overflow;
// each factor is >= 2, and 1e250 * 65535-ish headroom keeps us finite.
constexpr double kProductFlush = 1e250;

struct Candidate {
  double distance;
  Index row, col;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.row != b.row) return a.row < b.row;
  return a.col < b.col;
}

// Distance between the windows at origins a and b over a precomputed
// sqrt-intensity plane. Same per-pixel terms as patch_distance up to
// rounding; exact ties (identical content) are exact here too.
double window_distance(const ImageArray& s, PatchOrigin a, PatchOrigin b, int side,
                       double prefactor) {
  double acc = 0.0;
  double prod = 1.0;
  for (int r = 0; r < side; ++r) {
    const double* pa = s.data() + (a.row + r) * s.cols() + a.col;
    const double* pb = s.data() + (b.row + r) * s.cols() + b.col;
    for (int c = 0; c < side; ++c) {
      const double t = pa[c] / pb[c] + pb[c] / pa[c];
      prod *= t;
      if (prod > kProductFlush) {
        acc += std::log(prod);
        prod = 1.0;
      }
    }
  }
  return prefactor * (acc + std::log(prod));
}

} // namespace

void PatchGeometry::validate() const {
  if (patch_side < 3)
    throw ValidationError("geometry: patch_side must be >= 3");
  if (patch_side % 2 == 0)
    throw ValidationError("geometry: patch_side must be odd");
  if (search_radius < 1)
    throw ValidationError("geometry: search_radius must be >= 1");
  if (group_size < 2)
    throw ValidationError("geometry: group_size must be >= 2");
  if (stride < 1)
    throw ValidationError("geometry: stride must be >= 1");
  if (stride > patch_side)
    throw ValidationError(
        "geometry: stride must not exceed patch_side (pixels would be "
        "missed by every reference patch)");
  const long long window = 2LL * search_radius + 1;
  if (window * window < group_size)
    throw ValidationError(
        "geometry: search window smaller than the requested group size");
}

Vector extract_patch(const ImageArray& image, PatchOrigin origin, int side) {
  Vector v(side * side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      v[r * side + c] = image(origin.row + r, origin.col + c);
  return v;
}

double patch_distance(const Vector& zi, const Vector& zj, Looks looks) {
  if (zi.size() != zj.size())
    throw ValidationError("patch_distance: patch size mismatch");
  if (zi.size() == 0) throw ValidationError("patch_distance: empty patches");
  double sum = 0.0;
  for (Index k = 0; k < zi.size(); ++k) {
    // exp argument capped so corrupt inputs cannot reach inf/inf = NaN.
    const double ai = std::max(std::exp(std::min(zi[k], 709.0)), kIntensityFloor);
    const double aj = std::max(std::exp(std::min(zj[k], 709.0)), kIntensityFloor);
    sum += std::log(std::sqrt(ai / aj) + std::sqrt(aj / ai));
  }
  return (2.0 * looks.count - 1.0) * sum;
}

SearchContext::SearchContext(const Raster& log_image)
    : image_(log_image),
      // Same cap as patch_distance: keeps every plane value finite and
      // positive so window distances are never NaN.
      sqrt_intensity_(
          log_image.array().min(709.0).exp().max(kIntensityFloor).sqrt()) {
  if (log_image.domain() != Domain::Log)
    throw ValidationError("search: expected a log raster");
}

PatchGroup find_similar(const SearchContext& context, PatchOrigin reference,
                        const PatchGeometry& geometry, Looks looks) {
  geometry.validate();
  const Raster& image = context.image();
  const int side = geometry.patch_side;
  const Index max_row = image.height() - side;
  const Index max_col = image.width() - side;
  if (max_row < 0 || max_col < 0)
    throw ValidationError("find_similar: patch larger than image");
  if (reference.row < 0 || reference.col < 0 || reference.row > max_row ||
      reference.col > max_col)
    throw ValidationError("find_similar: reference patch out of bounds");

  const double prefactor = 2.0 * looks.count - 1.0;
  const ImageArray& s = context.sqrt_intensity();
  const Index r0 = std::max<Index>(0, reference.row - geometry.search_radius);
  const Index r1 = std::min(max_row, reference.row + geometry.search_radius);
  const Index c0 = std::max<Index>(0, reference.col - geometry.search_radius);
  const Index c1 = std::min(max_col, reference.col + geometry.search_radius);

  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(r1 - r0 + 1) * (c1 - c0 + 1));
  for (Index rr = r0; rr <= r1; ++rr)
    for (Index cc = c0; cc <= c1; ++cc) {
      if (rr == reference.row && cc == reference.col) continue;
      candidates.push_back(
          {window_distance(s, reference, {rr, cc}, side, prefactor), rr, cc});
    }

  const std::size_t take =
      std::min<std::size_t>(geometry.group_size - 1, candidates.size());
  if (take < candidates.size())
    std::nth_element(candidates.begin(), candidates.begin() + take,
                     candidates.end(), candidate_less);
  std::sort(candidates.begin(), candidates.begin() + take, candidate_less);

  PatchGroup group;
  group.requested_size = geometry.group_size;
  group.truncated = (take + 1) < static_cast<std::size_t>(geometry.group_size);
  const Index m = static_cast<Index>(take) + 1;
  group.data.resize(geometry.patch_size(), m);
  group.origins.resize(m);
  group.distances.resize(m);

  group.data.col(0) = extract_patch(image.array(), reference, side);
  group.origins[0] = reference;
  group.distances[0] = window_distance(s, reference, reference, side, prefactor);
  for (Index j = 1; j < m; ++j) {
    const Candidate& c = candidates[j - 1];
    group.data.col(j) = extract_patch(image.array(), {c.row, c.col}, side);
    group.origins[j] = {c.row, c.col};
    group.distances[j] = c.distance;
  }
  return group;
}

PatchGroup find_similar(const Raster& log_image, PatchOrigin reference,
                        const PatchGeometry& geometry, Looks looks) {
  return find_similar(SearchContext(log_image), reference, geometry, looks);
}

std::vector<PatchOrigin> reference_origins(Index height, Index width,
                                           const PatchGeometry& geometry) {
  geometry.validate();
  const Index side = geometry.patch_side;
  if (height < side || width < side)
    throw ValidationError("reference_origins: image smaller than patch");

  auto ticks = [&](Index extent) {
    std::vector<Index> t;
    const Index last = extent - side;
    for (Index p = 0; p < last; p += geometry.stride) t.push_back(p);
    t.push_back(last); // final offset patch, may break the stride rhythm
    return t;
  };

  const std::vector<Index> rows = ticks(height);
  const std::vector<Index> cols = ticks(width);
  std::vector<PatchOrigin> origins;
  origins.reserve(rows.size() * cols.size());
  for (Index r : rows)
    for (Index c : cols) origins.push_back({r, c});
  return origins;
}

} // namespace pdd
