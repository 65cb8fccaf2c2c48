#include "pdd/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "pdd/log_domain.hpp"

namespace pdd {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& origin, std::size_t line,
                      const std::string& what) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(const std::string& text, const std::string& origin,
               std::size_t line, const std::string& key) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end)
    bad(origin, line, "invalid value for " + key + ": '" + text + "'");
  return value;
}

// Shortest round-trip representation, so save/load is lossless and the
// files stay human-readable.
std::string format_double(double v) {
  char buffer[32];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

} // namespace

const char* aggregation_name(AggregationWeights w) {
  return w == AggregationWeights::Uniform ? "uniform" : "sparsity";
}

void DenoiseConfig::validate() const {
  geometry().validate(); // patch/search/stride/group constraints
  if (dict_size < 1)
    throw ValidationError("config: dict_size must be >= 1");
  if (ksvd_iters < 1)
    throw ValidationError("config: ksvd_iters must be >= 1");
  if (sparsity_cap < 0)
    throw ValidationError("config: sparsity_cap must be >= 0 (0 = uncapped)");
  if (!(error_gain > 0.0))
    throw ValidationError("config: error_gain must be positive");
  if (looks < 1)
    throw ValidationError("config: looks must be set (>= 1); it calibrates "
                          "the similarity measure, the coding error bound "
                          "and the bias correction");
  if (!(floor_scale > 0.0))
    throw ValidationError("config: floor_scale must be positive");
}

PatchGeometry DenoiseConfig::geometry() const {
  PatchGeometry g;
  g.patch_side = patch_side;
  g.search_radius = search_radius;
  g.stride = stride;
  g.group_size = group_size;
  return g;
}

SparseStop DenoiseConfig::coding_stop() const {
  SparseStop stop;
  stop.max_nonzeros = sparsity_cap;
  stop.error_bound = static_cast<double>(patch_side) * patch_side * error_gain *
                     log_speckle_variance(Looks(looks));
  return stop;
}

DenoiseConfig parse_config(const std::string& text, const std::string& origin) {
  DenoiseConfig config;
  std::map<std::string, bool> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      bad(origin, line_no, "expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad(origin, line_no, "empty key");
    if (key.rfind("run.", 0) == 0) continue; // manifest namespace, not config
    if (seen[key]) bad(origin, line_no, "duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "patch_side")
      config.patch_side = parse_number<int>(value, origin, line_no, key);
    else if (key == "search_radius")
      config.search_radius = parse_number<int>(value, origin, line_no, key);
    else if (key == "group_size")
      config.group_size = parse_number<int>(value, origin, line_no, key);
    else if (key == "stride")
      config.stride = parse_number<int>(value, origin, line_no, key);
    else if (key == "dict_size")
      config.dict_size = parse_number<int>(value, origin, line_no, key);
    else if (key == "ksvd_iters")
      config.ksvd_iters = parse_number<int>(value, origin, line_no, key);
    else if (key == "sparsity_cap")
      config.sparsity_cap = parse_number<int>(value, origin, line_no, key);
    else if (key == "error_gain")
      config.error_gain = parse_number<double>(value, origin, line_no, key);
    else if (key == "looks")
      config.looks = parse_number<int>(value, origin, line_no, key);
    else if (key == "floor_scale")
      config.floor_scale = parse_number<double>(value, origin, line_no, key);
    else if (key == "seed")
      config.seed = parse_number<std::uint64_t>(value, origin, line_no, key);
    else if (key == "aggregation_weights") {
      if (value == "uniform")
        config.aggregation_weights = AggregationWeights::Uniform;
      else if (value == "sparsity")
        config.aggregation_weights = AggregationWeights::Sparsity;
      else
        bad(origin, line_no,
            "aggregation_weights must be 'uniform' or 'sparsity', got '" +
                value + "'");
    } else {
      bad(origin, line_no, "unknown key '" + key + "'");
    }
  }
  return config;
}

DenoiseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string config_to_text(const DenoiseConfig& config) {
  std::ostringstream out;
  out << "patch_side=" << config.patch_side << "\n"
      << "search_radius=" << config.search_radius << "\n"
      << "group_size=" << config.group_size << "\n"
      << "stride=" << config.stride << "\n"
      << "dict_size=" << config.dict_size << "\n"
      << "ksvd_iters=" << config.ksvd_iters << "\n"
      << "sparsity_cap=" << config.sparsity_cap << "\n"
      << "error_gain=" << format_double(config.error_gain) << "\n"
      << "looks=" << config.looks << "\n"
      << "floor_scale=" << format_double(config.floor_scale) << "\n"
      << "seed=" << config.seed << "\n"
      << "aggregation_weights=" << aggregation_name(config.aggregation_weights)
      << "\n";
  return out.str();
}

void save_config(const DenoiseConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << config_to_text(config);
  if (!out) throw IoError(path + ": write failed");
}

} // namespace pdd
