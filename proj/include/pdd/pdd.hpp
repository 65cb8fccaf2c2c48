#pragma once

#include <cstdint>
#include <vector>

#include "pdd/config.hpp"
#include "pdd/grouping.hpp"
#include "pdd/sparse.hpp"

namespace pdd {

// How often each atom is used across a coded batch (row L0 norms of the
// coefficient matrix), plus the atom order sorted by descending frequency.
// The sort is stable, so equal frequencies keep ascending atom index.
struct AtomFrequencies {
  std::vector<int> counts;  // per atom
  std::vector<Index> order; // descending frequency, stable
};

AtomFrequencies atom_frequencies(const CoefficientMatrix& coefficients);

// Number of principal atoms: build a histogram of the frequency values
// (unit-width integer bins, zeros included), find the modal value f* (ties
// to the lower value), and keep the atoms with frequency strictly above f*.
// Degenerate histograms fall back to the lower median of the nonzero
// frequencies (kept with >=), then to 1. All-zero frequencies are an error.
Index choose_threshold(const AtomFrequencies& frequencies);

// Dictionary and coefficients reordered by descending atom frequency and
// split at the threshold. principal * principal_rows plus
// residual * residual_rows reproduces the full reconstruction exactly.
struct PrincipalSplit {
  Matrix principal;        // N x P
  Matrix residual;         // N x (K-P)
  Matrix principal_rows;   // P x M
  Matrix residual_rows;    // (K-P) x M
  std::vector<Index> order;
  Index threshold = 0;
};

PrincipalSplit principal_split(const Dictionary& dict,
                               const CoefficientMatrix& coefficients, Index threshold);

struct GroupDiagnostics {
  PatchOrigin origin;
  Index members = 0;
  Index principal_count = 0;
  Index dict_size = 0;
  double mean_support = 0.0;
  double training_error = 0.0;
  bool error_flagged = false; // training error unusually high for the group
};

struct GroupEstimate {
  Matrix estimates; // patch_size x members, log domain
  Vector weights;   // per-member aggregation weight, all positive
  GroupDiagnostics diagnostics;
};

// Full treatment of one group: learn a dictionary on the group's patches,
// rank atoms by usage, keep only the principal ones for reconstruction.
// group_seed must be derived from the run seed and the group's position so
// results do not depend on scheduling.
GroupEstimate denoise_group(const PatchGroup& group, const DenoiseConfig& config,
                            std::uint64_t group_seed);

// Accumulates weighted patch estimates into an image. Not thread-safe;
// use one accumulator per worker and merge.
class Accumulator {
public:
  Accumulator(Index height, Index width);

  void add(const Matrix& estimates, const std::vector<PatchOrigin>& origins,
           const Vector& weights, int patch_side);
  void merge(const Accumulator& other);

  // Weighted average as a log-domain raster. Throws NumericError if any
  // pixel was never covered.
  Raster finalize() const;

  const ImageArray& numerator() const { return numerator_; }
  const ImageArray& denominator() const { return denominator_; }

private:
  ImageArray numerator_;
  ImageArray denominator_;
};

} // namespace pdd
