#include "pdd/pdd.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "pdd/log_domain.hpp"
#include "pdd/speckle.hpp"

namespace pdd {

AtomFrequencies atom_frequencies(const CoefficientMatrix& coefficients) {
  const Index k_count = coefficients.dict_size();
  const Index m_count = coefficients.signals();
  if (k_count < 1 || m_count < 1)
    throw ValidationError("atom_frequencies: empty coefficient matrix");

  AtomFrequencies out;
  out.counts.assign(static_cast<std::size_t>(k_count), 0);
  for (Index k = 0; k < k_count; ++k) {
    int c = 0;
    for (Index m = 0; m < m_count; ++m)
      if (coefficients.entries(k, m) != 0.0) ++c;
    out.counts[static_cast<std::size_t>(k)] = c;
  }

  out.order.resize(static_cast<std::size_t>(k_count));
  std::iota(out.order.begin(), out.order.end(), Index{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](Index a, Index b) {
    return out.counts[static_cast<std::size_t>(a)] >
           out.counts[static_cast<std::size_t>(b)];
  });
  return out;
}

Index choose_threshold(const AtomFrequencies& frequencies) {
  const std::size_t k_count = frequencies.counts.size();
  if (k_count == 0) throw ValidationError("choose_threshold: no atoms");

  const int max_count = *std::max_element(frequencies.counts.begin(),
                                          frequencies.counts.end());
  if (max_count <= 0)
    throw NumericError("choose_threshold: every atom frequency is zero "
                       "(the batch coded to nothing)");

  // Histogram over the frequency values themselves, unit integer bins,
  // zeros included. The mode separates the rarely-used mass from the
  // heavily-used atoms; ties go to the lower value.
  std::vector<int> histogram(static_cast<std::size_t>(max_count) + 1, 0);
  for (int f : frequencies.counts) ++histogram[static_cast<std::size_t>(f)];
  std::size_t mode = 0;
  for (std::size_t v = 1; v < histogram.size(); ++v)
    if (histogram[v] > histogram[mode]) mode = v;

  Index principal = 0;
  for (int f : frequencies.counts)
    if (f > static_cast<int>(mode)) ++principal;
  if (principal > 0) return principal;

  // Degenerate histogram (e.g. all frequencies equal): keep everything at
  // or above the lower median of the nonzero frequencies.
  std::vector<int> nonzero;
  for (int f : frequencies.counts)
    if (f > 0) nonzero.push_back(f);
  std::sort(nonzero.begin(), nonzero.end());
  const int median = nonzero[(nonzero.size() - 1) / 2];
  for (int f : frequencies.counts)
    if (f >= median) ++principal;
  return principal > 0 ? principal : 1;
}

PrincipalSplit principal_split(const Dictionary& dict,
                               const CoefficientMatrix& coefficients,
                               Index threshold) {
  const Index k_count = dict.size();
  const Index m_count = coefficients.signals();
  if (coefficients.dict_size() != k_count)
    throw ValidationError("principal_split: coefficient rows != atom count");
  if (threshold < 1 || threshold > k_count)
    throw ValidationError("principal_split: threshold out of range");

  const AtomFrequencies frequencies = atom_frequencies(coefficients);

  PrincipalSplit split;
  split.order = frequencies.order;
  split.threshold = threshold;
  split.principal.resize(dict.dim(), threshold);
  split.principal_rows.resize(threshold, m_count);
  split.residual.resize(dict.dim(), k_count - threshold);
  split.residual_rows.resize(k_count - threshold, m_count);

  for (Index i = 0; i < k_count; ++i) {
    const Index atom = split.order[static_cast<std::size_t>(i)];
    if (i < threshold) {
      split.principal.col(i) = dict.atoms().col(atom);
      split.principal_rows.row(i) = coefficients.entries.row(atom);
    } else {
      split.residual.col(i - threshold) = dict.atoms().col(atom);
      split.residual_rows.row(i - threshold) = coefficients.entries.row(atom);
    }
  }
  return split;
}

GroupEstimate denoise_group(const PatchGroup& group, const DenoiseConfig& config,
                            std::uint64_t group_seed) {
  config.validate();
  const Index members = group.members();
  if (members < 1) throw ValidationError("denoise_group: empty group");

  GroupEstimate out;
  out.diagnostics.origin = group.origins.empty() ? PatchOrigin{} : group.origins[0];
  out.diagnostics.members = members;

  // A group with a single member (tiny image or extreme truncation) has
  // nothing to learn from; pass the patch through unchanged.
  if (members < 2) {
    out.estimates = group.data;
    out.weights = Vector::Ones(1);
    return out;
  }

  // The patch mean carries the local radiometric level, not texture: learn
  // and code on centered columns so atoms model structure, then restore the
  // means. This also makes a global intensity rescale (a constant shift
  // here in the log domain) pass straight through the estimates instead of
  // steering the pursuit into different supports.
  const Eigen::RowVectorXd means = group.data.colwise().mean();
  Matrix centered = group.data;
  centered.rowwise() -= means;

  KsvdOptions options;
  options.dict_size = config.dict_size;
  options.iterations = config.ksvd_iters;
  options.stop = config.coding_stop();
  options.seed = group_seed;
  const KsvdResult learned = ksvd_learn(centered, options);

  out.diagnostics.dict_size = learned.dictionary.size();
  out.diagnostics.training_error = learned.report.error_trace.back();
  // Flag groups whose final fit is far outside the coding stop's target.
  out.diagnostics.error_flagged =
      out.diagnostics.training_error >
      2.0 * static_cast<double>(members) * options.stop.error_bound;

  double support_sum = 0.0;
  for (const auto& s : learned.coefficients.supports)
    support_sum += static_cast<double>(s.size());
  out.diagnostics.mean_support = support_sum / static_cast<double>(members);

  const AtomFrequencies frequencies = atom_frequencies(learned.coefficients);
  const bool all_zero =
      *std::max_element(frequencies.counts.begin(), frequencies.counts.end()) <= 0;
  if (all_zero) {
    // Every centered column coded empty: the noise bound already covers
    // the fluctuation around the mean, so the estimate is the mean alone.
    out.estimates = Matrix::Zero(group.data.rows(), members);
    out.diagnostics.principal_count = 0;
  } else {
    const Index threshold = choose_threshold(frequencies);
    const PrincipalSplit split =
        principal_split(learned.dictionary, learned.coefficients, threshold);
    out.estimates = split.principal * split.principal_rows;
    out.diagnostics.principal_count = threshold;
  }
  out.estimates.rowwise() += means;

  if (config.aggregation_weights == AggregationWeights::Uniform) {
    out.weights = Vector::Ones(members);
  } else {
    // One shared weight per group: flatter stacks (sparser codes) carry
    // more confidence in the average.
    const double w = 1.0 / (1.0 + out.diagnostics.mean_support);
    out.weights = Vector::Constant(members, w);
  }
  return out;
}

Accumulator::Accumulator(Index height, Index width)
    : numerator_(ImageArray::Zero(height, width)),
      denominator_(ImageArray::Zero(height, width)) {
  if (height < 1 || width < 1)
    throw ValidationError("accumulator: empty image");
}

void Accumulator::add(const Matrix& estimates,
                      const std::vector<PatchOrigin>& origins,
                      const Vector& weights, int patch_side) {
  const Index members = estimates.cols();
  if (static_cast<Index>(origins.size()) != members || weights.size() != members)
    throw ValidationError("accumulator: estimates/origins/weights size mismatch");
  if (estimates.rows() != static_cast<Index>(patch_side) * patch_side)
    throw ValidationError("accumulator: patch size mismatch");

  for (Index j = 0; j < members; ++j) {
    const double w = weights[j];
    if (!(w > 0.0))
      throw ValidationError("accumulator: weights must be positive");
    const PatchOrigin o = origins[static_cast<std::size_t>(j)];
    if (o.row < 0 || o.col < 0 || o.row + patch_side > numerator_.rows() ||
        o.col + patch_side > numerator_.cols())
      throw ValidationError("accumulator: patch outside image");
    for (int r = 0; r < patch_side; ++r)
      for (int c = 0; c < patch_side; ++c) {
        numerator_(o.row + r, o.col + c) += w * estimates(r * patch_side + c, j);
        denominator_(o.row + r, o.col + c) += w;
      }
  }
}

void Accumulator::merge(const Accumulator& other) {
  if (other.numerator_.rows() != numerator_.rows() ||
      other.numerator_.cols() != numerator_.cols())
    throw ValidationError("accumulator: merge size mismatch");
  numerator_ += other.numerator_;
  denominator_ += other.denominator_;
}

Raster Accumulator::finalize() const {
  if ((denominator_ <= 0.0).any())
    throw NumericError("accumulator: uncovered pixels (reference grid did not "
                       "reach every pixel)");
  ImageArray out = numerator_ / denominator_;
  return Raster(std::move(out), Domain::Log);
}

} // namespace pdd
