#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fput2d/harness.hpp"

namespace fput2d::cli {

/// Malformed config files, unknown keys and out-of-type values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ExperimentPlan plan;
  double eps = 0.2;  // simulate
  bool synthetic = false;
  std::size_t snapshots = 4;
};

struct KeyDoc {
  std::string name;
  std::string help;
};

/// Every accepted config key, in the order --help lists them.
const std::vector<KeyDoc>& config_keys();

/// A JSON object of key/value pairs applied on top of cfg.
void apply_config_text(RunConfig& cfg, std::string_view json_text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// One key=value override. The value is read as JSON when it parses and as a
/// bare string otherwise, so form=strain and eps_list=[0.2,0.1,0.05] both work.
void apply_setting(RunConfig& cfg, std::string_view assignment);

}  // namespace fput2d::cli
