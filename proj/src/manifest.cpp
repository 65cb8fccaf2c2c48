#include "pdd/manifest.hpp"

#include <fstream>
#include <sstream>

namespace pdd {

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ostringstream out;
  out << "run.command=" << manifest.command << "\n"
      << "run.input=" << manifest.input << "\n"
      << "run.output=" << manifest.output << "\n"
      << "run.version=" << manifest.version << "\n"
      << "run.rng=" << manifest.rng << "\n"
      << "run.duration_ms=" << manifest.duration_ms << "\n";
  for (const auto& [stage, ms] : manifest.stage_ms)
    out << "run.stage." << stage << "_ms=" << ms << "\n";
  for (const auto& [key, value] : manifest.extra)
    out << "run." << key << "=" << value << "\n";
  if (manifest.has_config) {
    out << "# effective configuration\n";
    out << config_to_text(manifest.config);
  }

  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError(path + ": cannot open for writing");
  file << out.str();
  if (!file) throw IoError(path + ": write failed");
}

} // namespace pdd
