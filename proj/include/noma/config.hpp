#pragma once

#include "noma/sim.hpp"

#include <string>

namespace noma {

inline constexpr const char* kConfigSchema = "noma-sched/1";

/// Invalid configuration value; `key()` is the JSON path of the offending entry.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string key, const std::string& message)
      : InvalidArgument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses a JSON scenario config. Absent keys keep their defaults; unknown keys are errors.
ScenarioConfig parse_config(const std::string& text);

/// Throws std::ios_base::failure when the file cannot be opened.
ScenarioConfig load_config(const std::string& path);

/// Full effective config as JSON; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ScenarioConfig& config);

}  // namespace noma
