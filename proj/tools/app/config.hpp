#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tribaker::app {

/// Everything a command needs. Values are layered: built-in defaults, then a
/// named preset, then a key=value config file, then command-line flags.
struct RunConfig {
  int n_dim = 243;
  std::vector<double> reflectivities;  // empty: the command's own default list
  int l_max = 7;
  int n_c = 60;
  double eps = 1e-3;
  double target_p = 0.8;
  int n_max_out = -1;                  // -1: use `policies` (sweep) or the per-R schedule
  std::vector<int> policies = {0, 5, 50};
  int grid = 0;                        // 0: the command's own default (243 measure, 128 images)
  int cover_grid = 27;
  int time = 10;
  std::uint64_t samples = 10'000'000;
  std::uint64_t seed = 1;
  int tau = 0;                         // 0: round(ln N / ln 3)
  double svd_tol = 1e-8;
  int scan_stride = 1;
  std::filesystem::path out = "out";
  int jobs = 1;
  bool large = false;

  void validate() const;
};

/// Applies one key=value setting. Throws std::invalid_argument for unknown
/// keys or malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Reads a flat key=value file in order. Blank lines and lines starting with
/// '#' are skipped; "preset = name" is kept as an ordinary setting so it
/// applies in place.
Settings read_settings(const std::filesystem::path& path);

void apply_file(RunConfig& cfg, const std::filesystem::path& path);

/// Named presets, one per figure plus the large-N spot check.
const std::map<std::string, std::map<std::string, std::string>>& presets();
void apply_preset(RunConfig& cfg, const std::string& name);

/// Serialized settings in a stable order, used for run manifests.
std::string describe(const RunConfig& cfg);

std::vector<double> parse_list(const std::string& text);

}  // namespace tribaker::app
