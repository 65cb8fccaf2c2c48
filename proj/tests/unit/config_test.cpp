#include <doctest.h>

#include <cstdint>
#include <string>

#include "pdd/config.hpp"
#include "pdd/log_domain.hpp"
#include "pdd/manifest.hpp"

using namespace pdd;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/pdd_config_test_") + name;
}

bool same_config(const DenoiseConfig& a, const DenoiseConfig& b) {
  return a.patch_side == b.patch_side && a.search_radius == b.search_radius &&
         a.group_size == b.group_size && a.stride == b.stride &&
         a.dict_size == b.dict_size && a.ksvd_iters == b.ksvd_iters &&
         a.sparsity_cap == b.sparsity_cap && a.error_gain == b.error_gain &&
         a.looks == b.looks && a.floor_scale == b.floor_scale &&
         a.seed == b.seed && a.aggregation_weights == b.aggregation_weights;
}

} // namespace

TEST_CASE("defaults are exactly as documented") {
  const DenoiseConfig config;
  CHECK(config.patch_side == 7);
  CHECK(config.search_radius == 40);
  CHECK(config.group_size == 90);
  CHECK(config.stride == 3);
  CHECK(config.dict_size == 128);
  CHECK(config.ksvd_iters == 12);
  CHECK(config.sparsity_cap == 12);
  CHECK(config.error_gain == 1.1);
  CHECK(config.looks == 0); // unset until the caller provides it
  CHECK(config.floor_scale == 1e-10);
  CHECK(config.seed == 0);
  CHECK(config.aggregation_weights == AggregationWeights::Uniform);
}

TEST_CASE("defaults validate once looks is set") {
  DenoiseConfig config;
  CHECK_THROWS_AS(config.validate(), ValidationError); // looks unset
  config.looks = 1;
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("save and load round-trip every field") {
  DenoiseConfig config;
  config.patch_side = 5;
  config.search_radius = 17;
  config.group_size = 33;
  config.stride = 2;
  config.dict_size = 64;
  config.ksvd_iters = 7;
  config.sparsity_cap = 9;
  config.error_gain = 1.37;
  config.looks = 4;
  config.floor_scale = 2.5e-9;
  config.seed = 18446744073709551615ULL; // max uint64 must survive
  config.aggregation_weights = AggregationWeights::Sparsity;

  const std::string path = temp_path("roundtrip.cfg");
  save_config(config, path);
  const DenoiseConfig loaded = load_config(path);
  CHECK(same_config(config, loaded));
}

TEST_CASE("parse accepts comments, blanks, and spaced key=value") {
  const DenoiseConfig config = parse_config(
      "# despeckle run\n"
      "\n"
      "  patch_side = 9  \n"
      "looks=2\n",
      "inline");
  CHECK(config.patch_side == 9);
  CHECK(config.looks == 2);
  CHECK(config.search_radius == 40); // untouched default
}

TEST_CASE("parse rejects unknown keys") {
  CHECK_THROWS_AS(parse_config("patchside=7\n", "inline"), ValidationError);
  CHECK_THROWS_AS(parse_config("window=81\n", "inline"), ValidationError);
}

TEST_CASE("parse rejects duplicate keys") {
  CHECK_THROWS_AS(parse_config("looks=1\nlooks=2\n", "inline"), ValidationError);
}

TEST_CASE("parse rejects malformed lines and values") {
  CHECK_THROWS_AS(parse_config("looks\n", "inline"), ValidationError);
  CHECK_THROWS_AS(parse_config("=5\n", "inline"), ValidationError);
  CHECK_THROWS_AS(parse_config("looks=four\n", "inline"), ValidationError);
  CHECK_THROWS_AS(parse_config("looks=4x\n", "inline"), ValidationError);
  CHECK_THROWS_AS(parse_config("error_gain=\n", "inline"), ValidationError);
  CHECK_THROWS_AS(parse_config("aggregation_weights=mean\n", "inline"),
                  ValidationError);
}

TEST_CASE("parse skips the manifest namespace") {
  const DenoiseConfig config = parse_config(
      "run.command=despeckle\n"
      "run.duration_ms=123.4\n"
      "looks=8\n",
      "inline");
  CHECK(config.looks == 8);
}

TEST_CASE("a manifest's config block reproduces the run configuration") {
  DenoiseConfig config;
  config.looks = 4;
  config.seed = 99;
  config.stride = 2;

  RunManifest manifest;
  manifest.command = "despeckle";
  manifest.input = "in.pgm";
  manifest.output = "out.pgm";
  manifest.duration_ms = 1234.5;
  manifest.stage_ms = {{"transform", 10.0}, {"groups", 1200.0}};
  manifest.extra = {{"workers", "3"}};
  manifest.has_config = true;
  manifest.config = config;

  const std::string path = temp_path("run.manifest");
  write_manifest(manifest, path);
  const DenoiseConfig loaded = load_config(path);
  CHECK(same_config(config, loaded));
}

TEST_CASE("validation catches out-of-range fields") {
  DenoiseConfig config;
  config.looks = 1;

  DenoiseConfig bad = config;
  bad.patch_side = 8; // must be odd
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = config;
  bad.stride = 9; // larger than patch_side breaks coverage
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = config;
  bad.group_size = 1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = config;
  bad.dict_size = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = config;
  bad.ksvd_iters = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = config;
  bad.sparsity_cap = -1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = config;
  bad.error_gain = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = config;
  bad.floor_scale = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("geometry mirrors the grouping fields") {
  DenoiseConfig config;
  config.patch_side = 5;
  config.search_radius = 12;
  config.stride = 2;
  config.group_size = 30;
  const PatchGeometry g = config.geometry();
  CHECK(g.patch_side == 5);
  CHECK(g.search_radius == 12);
  CHECK(g.stride == 2);
  CHECK(g.group_size == 30);
  CHECK(g.patch_size() == 25);
}

TEST_CASE("coding stop is calibrated to the speckle log variance") {
  DenoiseConfig config;
  config.looks = 1;
  const SparseStop stop1 = config.coding_stop();
  CHECK(stop1.max_nonzeros == 12);
  // 49 * 1.1 * trigamma(1), trigamma(1) = pi^2/6
  CHECK(stop1.error_bound ==
        doctest::Approx(49.0 * 1.1 * 1.6449340668482264).epsilon(1e-12));

  config.looks = 4;
  config.patch_side = 5;
  config.error_gain = 2.0;
  config.sparsity_cap = 0; // uncapped
  const SparseStop stop4 = config.coding_stop();
  CHECK(stop4.max_nonzeros == 0);
  CHECK(stop4.error_bound ==
        doctest::Approx(25.0 * 2.0 * 0.2838229557371153).epsilon(1e-12));
  CHECK(stop4.error_bound ==
        doctest::Approx(25.0 * 2.0 * log_speckle_variance(Looks(4))).epsilon(1e-15));
}

TEST_CASE("load_config reports missing files as I/O errors") {
  CHECK_THROWS_AS(load_config("/tmp/pdd_config_test_missing.cfg"), IoError);
}

TEST_CASE("config text is stable and ends each line with a newline") {
  const DenoiseConfig config = parse_config("looks=1\n", "inline");
  const std::string text = config_to_text(config);
  CHECK(text.find("patch_side=7\n") != std::string::npos);
  CHECK(text.find("aggregation_weights=uniform\n") != std::string::npos);
  CHECK(text.back() == '\n');
  // serialized text parses back to the same configuration
  CHECK(same_config(config, parse_config(text, "echo")));
}
