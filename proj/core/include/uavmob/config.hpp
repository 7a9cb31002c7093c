#pragma once

// Flat `key = value` run configuration. `#` starts a comment; unknown keys and
// repeated keys are rejected; absent keys keep their defaults (urban 2 GHz
// link, 10 m/s cruise, 1.2 km x 1.2 km area).

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "uavmob/scenario.hpp"

namespace uavmob::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line, std::string key)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  /// 1-based line number; 0 when the error is not tied to one line.
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

struct ParsedConfig {
  scenario::ScenarioConfig scenario;
  bool has_seed = false;
};

ParsedConfig parse_config_text(std::string_view text);
ParsedConfig parse_config(const std::filesystem::path& path);

/// Every key, resolved, in a form parse_config_text reads back to the same
/// configuration.
std::string format_config(const scenario::ScenarioConfig& config);

/// Reads the `# key = value` metadata lines of a manifest.
std::map<std::string, std::string> read_manifest_metadata(const std::filesystem::path& path);

}  // namespace uavmob::config
