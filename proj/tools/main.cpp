// Command-line front end: speckle simulation, despeckling, quality metrics
// and a dictionary inspection helper. Exit codes: 0 ok, 1 I/O, 2 usage or
// validation, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdd/log_domain.hpp"
#include "pdd/manifest.hpp"
#include "pdd/metrics.hpp"
#include "pdd/pipeline.hpp"
#include "pdd/raster_io.hpp"
#include "pdd/version.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

pdd::RegionSpec parse_region(const std::string& text) {
  pdd::RegionSpec region;
  long long x = 0, y = 0, w = 0, h = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lld,%lld,%lld,%lld%c", &x, &y, &w, &h, &tail) != 4)
    throw pdd::ValidationError("region must be x,y,width,height, got '" + text + "'");
  region.x = x;
  region.y = y;
  region.width = w;
  region.height = h;
  return region;
}

// Config file first, then command-line overrides on top.
struct ConfigCli {
  std::string config_path;
  int patch_side = -1, search_radius = -1, group_size = -1, stride = -1;
  int dict_size = -1, ksvd_iters = -1, sparsity_cap = -1, looks = -1;
  double error_gain = -1.0, floor_scale = -1.0;
  long long seed = -1;
  std::string aggregation;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (key=value lines)");
    cmd->add_option("--patch-side", patch_side, "patch side length");
    cmd->add_option("--search-radius", search_radius, "half-width of the search window");
    cmd->add_option("--group-size", group_size, "patches per group");
    cmd->add_option("--stride", stride, "reference grid stride");
    cmd->add_option("--dict-size", dict_size, "dictionary atoms per group");
    cmd->add_option("--ksvd-iters", ksvd_iters, "dictionary learning iterations");
    cmd->add_option("--sparsity-cap", sparsity_cap, "max atoms per patch (0 = uncapped)");
    cmd->add_option("--error-gain", error_gain, "coding error bound gain");
    cmd->add_option("--looks", looks, "number of looks of the input");
    cmd->add_option("--floor-scale", floor_scale, "clamp floor as a fraction of the mean");
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_option("--aggregation-weights", aggregation, "uniform | sparsity");
  }

  pdd::DenoiseConfig resolve() const {
    pdd::DenoiseConfig cfg;
    if (!config_path.empty()) cfg = pdd::load_config(config_path);
    if (patch_side >= 0) cfg.patch_side = patch_side;
    if (search_radius >= 0) cfg.search_radius = search_radius;
    if (group_size >= 0) cfg.group_size = group_size;
    if (stride >= 0) cfg.stride = stride;
    if (dict_size >= 0) cfg.dict_size = dict_size;
    if (ksvd_iters >= 0) cfg.ksvd_iters = ksvd_iters;
    if (sparsity_cap >= 0) cfg.sparsity_cap = sparsity_cap;
    if (error_gain >= 0.0) cfg.error_gain = error_gain;
    if (looks >= 0) cfg.looks = looks;
    if (floor_scale >= 0.0) cfg.floor_scale = floor_scale;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!aggregation.empty()) {
      if (aggregation == "uniform")
        cfg.aggregation_weights = pdd::AggregationWeights::Uniform;
      else if (aggregation == "sparsity")
        cfg.aggregation_weights = pdd::AggregationWeights::Sparsity;
      else
        throw pdd::ValidationError(
            "aggregation-weights must be 'uniform' or 'sparsity'");
    }
    return cfg;
  }
};

int run_simulate(const std::string& input, const std::string& output, int looks,
                 long long seed, const std::string& manifest_path, bool quiet) {
  const auto t0 = Clock::now();
  const pdd::Raster clean = pdd::load_raster(input);
  pdd::SpeckleParams params{pdd::Looks(looks),
                            seed >= 0 ? static_cast<std::uint64_t>(seed) : 0};
  const pdd::Raster noisy = pdd::simulate_speckle(clean, params);
  pdd::save_raster(noisy, output);

  pdd::RunManifest manifest;
  manifest.command = "simulate";
  manifest.input = input;
  manifest.output = output;
  manifest.duration_ms = ms_since(t0);
  manifest.extra = {{"looks", std::to_string(looks)},
                    {"seed", std::to_string(params.seed)}};
  pdd::write_manifest(manifest,
                      manifest_path.empty() ? output + ".manifest" : manifest_path);
  if (!quiet)
    std::cerr << "simulate: " << output << " (" << noisy.width() << "x"
              << noisy.height() << ", looks " << looks << ")\n";
  return 0;
}

int run_despeckle(const std::string& input, const std::string& output,
                  const ConfigCli& cli, int workers,
                  const std::string& diagnostics_path,
                  const std::string& manifest_path, bool quiet) {
  const auto t0 = Clock::now();
  const pdd::DenoiseConfig config = cli.resolve();
  const pdd::Raster noisy = pdd::load_raster(input);

  pdd::DespeckleOptions options;
  options.workers = workers;
  options.collect_diagnostics = !diagnostics_path.empty();
  std::mutex progress_mutex;
  auto last_print = Clock::now();
  if (!quiet) {
    options.progress = [&](pdd::Index done, pdd::Index total) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      const auto now = Clock::now();
      if (done == total ||
          std::chrono::duration<double>(now - last_print).count() > 2.0) {
        last_print = now;
        const double elapsed = std::chrono::duration<double>(now - t0).count();
        const double rate = elapsed > 0.0 ? done / elapsed : 0.0;
        std::cerr << "despeckle: " << done << "/" << total << " groups ("
                  << std::fixed << std::setprecision(1) << rate
                  << " groups/sec)\r" << std::defaultfloat;
        if (done == total) std::cerr << "\n";
      }
    };
  }

  const pdd::DespeckleResult result = pdd::despeckle_image(noisy, config, options);
  pdd::save_raster(result.output, output);

  if (!diagnostics_path.empty()) {
    std::ofstream csv(diagnostics_path, std::ios::trunc);
    if (!csv) throw pdd::IoError(diagnostics_path + ": cannot open for writing");
    csv << "origin_row,origin_col,members,principal_count,dict_size,"
           "mean_support,training_error,error_flagged\n";
    for (const auto& d : result.diagnostics)
      csv << d.origin.row << "," << d.origin.col << "," << d.members << ","
          << d.principal_count << "," << d.dict_size << "," << d.mean_support
          << "," << d.training_error << "," << (d.error_flagged ? 1 : 0) << "\n";
    if (!csv) throw pdd::IoError(diagnostics_path + ": write failed");
  }

  pdd::RunManifest manifest;
  manifest.command = "despeckle";
  manifest.input = input;
  manifest.output = output;
  manifest.duration_ms = ms_since(t0);
  manifest.stage_ms = {{"transform", result.timings.transform_ms},
                       {"groups", result.timings.groups_ms},
                       {"finalize", result.timings.finalize_ms}};
  manifest.extra = {{"groups", std::to_string(result.groups)},
                    {"workers", std::to_string(workers)}};
  manifest.has_config = true;
  manifest.config = config;
  pdd::write_manifest(manifest,
                      manifest_path.empty() ? output + ".manifest" : manifest_path);
  if (!quiet)
    std::cerr << "despeckle: wrote " << output << " (" << result.groups
              << " groups, " << manifest.duration_ms / 1000.0 << " s)\n";
  return 0;
}

int run_metrics(const std::string& reference_path, const std::string& test_path,
                double peak, const std::vector<std::string>& region_texts,
                bool csv) {
  const bool paired = !reference_path.empty();
  pdd::Raster test = pdd::load_raster(test_path);

  std::vector<std::pair<std::string, double>> rows;
  if (paired) {
    const pdd::Raster reference = pdd::load_raster(reference_path);
    rows.emplace_back("psnr_db", pdd::psnr(reference, test, peak));
    rows.emplace_back("ssim", pdd::ssim(reference, test, peak));
  }
  for (std::size_t i = 0; i < region_texts.size(); ++i) {
    const pdd::RegionSpec region = parse_region(region_texts[i]);
    rows.emplace_back("enl_region" + std::to_string(i), pdd::enl(test, region));
  }
  if (rows.empty())
    throw pdd::ValidationError(
        "metrics: nothing to compute (need --reference and/or --region)");

  std::ostringstream out;
  out.precision(12);
  if (csv) {
    out << "metric,value\n";
    for (const auto& [name, value] : rows) out << name << "," << value << "\n";
  } else {
    for (const auto& [name, value] : rows) out << name << " = " << value << "\n";
  }
  std::cout << out.str();
  return 0;
}

int run_dict_dump(const std::string& input, const std::string& output,
                  const ConfigCli& cli, long long origin_row,
                  long long origin_col, const std::string& manifest_path,
                  bool quiet) {
  const auto t0 = Clock::now();
  const pdd::DenoiseConfig config = cli.resolve();
  config.validate();
  const pdd::Raster noisy = pdd::load_raster(input);

  const double floor_value = pdd::default_floor(noisy, config.floor_scale);
  const double bias = pdd::log_speckle_bias(pdd::Looks(config.looks));
  const pdd::Raster log_image =
      pdd::add_scalar(pdd::log_transform(noisy, floor_value), -bias);

  pdd::PatchOrigin origin;
  origin.row = origin_row >= 0 ? origin_row : (noisy.height() - config.patch_side) / 2;
  origin.col = origin_col >= 0 ? origin_col : (noisy.width() - config.patch_side) / 2;

  const pdd::PatchGroup group = pdd::find_similar(
      log_image, origin, config.geometry(), pdd::Looks(config.looks));
  if (group.members() < 2)
    throw pdd::ValidationError("dict-dump: group has a single member");

  pdd::KsvdOptions options;
  options.dict_size = config.dict_size;
  options.iterations = config.ksvd_iters;
  options.stop = config.coding_stop();
  options.seed = config.seed;
  const pdd::KsvdResult learned = pdd::ksvd_learn(group.data, options);
  const pdd::AtomFrequencies frequencies =
      pdd::atom_frequencies(learned.coefficients);
  const pdd::Index threshold = pdd::choose_threshold(frequencies);

  // The dictionary goes out as a raw float raster: one row per patch pixel,
  // one column per atom, log-domain tag (atoms live in log-intensity space).
  const pdd::Index k_count = learned.dictionary.size();
  pdd::ImageArray atom_grid = learned.dictionary.atoms().array();
  pdd::save_raw(pdd::Raster(std::move(atom_grid), pdd::Domain::Log), output);

  std::ostringstream table;
  table << "atom,frequency,principal\n";
  for (pdd::Index i = 0; i < k_count; ++i) {
    const pdd::Index atom = frequencies.order[static_cast<std::size_t>(i)];
    table << atom << "," << frequencies.counts[static_cast<std::size_t>(atom)]
          << "," << (i < threshold ? 1 : 0) << "\n";
  }
  std::cout << table.str();

  pdd::RunManifest manifest;
  manifest.command = "dict-dump";
  manifest.input = input;
  manifest.output = output;
  manifest.duration_ms = ms_since(t0);
  manifest.extra = {{"origin_row", std::to_string(origin.row)},
                    {"origin_col", std::to_string(origin.col)},
                    {"members", std::to_string(group.members())},
                    {"principal_atoms", std::to_string(threshold)}};
  manifest.has_config = true;
  manifest.config = config;
  pdd::write_manifest(manifest,
                      manifest_path.empty() ? output + ".manifest" : manifest_path);
  if (!quiet)
    std::cerr << "dict-dump: origin (" << origin.row << "," << origin.col
              << "), " << group.members() << " patches, " << threshold << "/"
              << k_count << " principal atoms -> " << output << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal patch-group despeckling for SAR intensity images"};
  app.set_version_flag("--version", pdd::kVersion);
  app.require_subcommand(1);
  // let global flags (--quiet) be written after the subcommand too
  app.fallthrough();
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "multiply a clean image by synthetic speckle");
  std::string sim_input, sim_output, sim_manifest;
  int sim_looks = 0;
  long long sim_seed = -1;
  simulate->add_option("--input", sim_input, "clean image (PGM or raw)")->required();
  simulate->add_option("--output", sim_output, "noisy image destination")->required();
  simulate->add_option("--looks", sim_looks, "number of looks")->required();
  simulate->add_option("--seed", sim_seed, "simulation seed (default 0)");
  simulate->add_option("--manifest", sim_manifest, "manifest path (default output + .manifest)");

  // despeckle
  auto* despeckle = app.add_subcommand("despeckle", "remove speckle from an intensity image");
  std::string den_input, den_output, den_diagnostics, den_manifest;
  int den_workers = 1;
  ConfigCli den_config;
  despeckle->add_option("--input", den_input, "noisy image (PGM or raw)")->required();
  despeckle->add_option("--output", den_output, "despeckled image destination")->required();
  despeckle->add_option("--workers", den_workers, "worker threads (default 1)");
  despeckle->add_option("--diagnostics", den_diagnostics, "per-group diagnostics CSV");
  despeckle->add_option("--manifest", den_manifest, "manifest path (default output + .manifest)");
  den_config.attach(despeckle);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "PSNR / SSIM / ENL of an image");
  std::string met_reference, met_test;
  double met_peak = 255.0;
  std::vector<std::string> met_regions;
  bool met_csv = false;
  metrics->add_option("--reference", met_reference, "clean reference (enables PSNR and SSIM)");
  metrics->add_option("--test", met_test, "image under test")->required();
  metrics->add_option("--peak", met_peak, "peak value / dynamic range (default 255)");
  metrics->add_option("--region", met_regions, "homogeneous region x,y,width,height for ENL (repeatable)");
  metrics->add_flag("--csv", met_csv, "CSV output");

  // dict-dump
  auto* dict_dump = app.add_subcommand("dict-dump", "learn one group's dictionary and dump it");
  std::string dd_input, dd_output, dd_manifest;
  long long dd_row = -1, dd_col = -1;
  ConfigCli dd_config;
  dict_dump->add_option("--input", dd_input, "noisy image (PGM or raw)")->required();
  dict_dump->add_option("--output", dd_output,
                        "dictionary destination, raw float (rows = patch pixels, columns = atoms)")
      ->required();
  dict_dump->add_option("--origin-row", dd_row, "reference patch row (default: center)");
  dict_dump->add_option("--origin-col", dd_col, "reference patch column (default: center)");
  dict_dump->add_option("--manifest", dd_manifest, "manifest path (default output + .manifest)");
  dd_config.attach(dict_dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2; // help/version exit cleanly, usage errors are 2
  }

  try {
    if (simulate->parsed())
      return run_simulate(sim_input, sim_output, sim_looks, sim_seed, sim_manifest, quiet);
    if (despeckle->parsed())
      return run_despeckle(den_input, den_output, den_config, den_workers,
                           den_diagnostics, den_manifest, quiet);
    if (metrics->parsed())
      return run_metrics(met_reference, met_test, met_peak, met_regions, met_csv);
    if (dict_dump->parsed())
      return run_dict_dump(dd_input, dd_output, dd_config, dd_row, dd_col,
                           dd_manifest, quiet);
  } catch (const pdd::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pdd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pdd::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
