#pragma once

#include <cstdint>
#include <string>

#include "pdd/grouping.hpp"
#include "pdd/sparse.hpp"

namespace pdd {

enum class AggregationWeights { Uniform, Sparsity };

// Every tunable of the despeckling chain. looks has no default: it controls
// the similarity prefactor, the coding error bound and the bias correction,
// so guessing it silently would corrupt results.
struct DenoiseConfig {
  int patch_side = 7;
  int search_radius = 40;
  int group_size = 90;
  int stride = 3;
  int dict_size = 128;
  int ksvd_iters = 12;
  int sparsity_cap = 12;
  double error_gain = 1.1;
  int looks = 0; // 0 = unset, must be provided
  double floor_scale = 1e-10;
  std::uint64_t seed = 0;
  AggregationWeights aggregation_weights = AggregationWeights::Uniform;

  void validate() const;

  PatchGeometry geometry() const;

  // Coding stop for this configuration: error bound
  // patch_size * error_gain * log_speckle_variance(looks), support capped
  // at sparsity_cap.
  SparseStop coding_stop() const;
};

// key=value text, one pair per line, '#' comments and blank lines ignored.
// Keys in the "run." namespace are skipped (they belong to run manifests,
// which reuse this syntax); any other unknown key is an error, as is a
// duplicate or malformed value.
DenoiseConfig load_config(const std::string& path);
DenoiseConfig parse_config(const std::string& text, const std::string& origin);

// Serialization used both for config files and the manifest's config block.
std::string config_to_text(const DenoiseConfig& config);
void save_config(const DenoiseConfig& config, const std::string& path);

const char* aggregation_name(AggregationWeights w);

} // namespace pdd
