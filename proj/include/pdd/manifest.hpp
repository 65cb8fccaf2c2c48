#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pdd/config.hpp"
#include "pdd/speckle.hpp"
#include "pdd/version.hpp"

namespace pdd {

// What a CLI run writes next to its outputs. Serialized in the same
// key=value syntax as config files, with run-level keys under "run." so the
// manifest itself parses as a valid config file.
struct RunManifest {
  std::string command;
  std::string input;
  std::string output;
  std::string rng = rng::kAlgorithm;
  std::string version = kVersion;
  double duration_ms = 0.0;
  std::vector<std::pair<std::string, double>> stage_ms;
  std::vector<std::pair<std::string, std::string>> extra; // command-specific
  bool has_config = false;
  DenoiseConfig config;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

} // namespace pdd
