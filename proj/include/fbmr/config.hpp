#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbmr/harness.hpp"

namespace fbmr {

inline constexpr int kSchemaVersion = 1;

/// Experiments a config can drive; the CLI subcommand selects one.
inline const std::vector<std::string>& experiment_names()
{
  static const std::vector<std::string> names{"simulate",     "riemann",       "verify-clt",
                                              "verify-limit", "verify-lemmas", "verify-residual"};
  return names;
}

/// `trapezoid` style keyword or an explicit `[[loc, weight], ...]` list.
SymmetricMeasure parse_measure(const nlohmann::json& spec);

FunctionFamily parse_function(const nlohmann::json& spec);

/// Structural parse; throws ConfigError on malformed input. Cross-field
/// checks live in config_diagnostics.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& experiment);

/// Cross-field diagnostics for an already parsed config; empty when valid.
std::vector<std::string> config_diagnostics(const ExperimentConfig& config);

/// Reads, parses and checks a config file. Empty iff schema-valid and every
/// cross-field invariant holds. Throws IoError when the file cannot be read.
std::vector<std::string> validate_config(const std::filesystem::path& path,
                                         const std::string& experiment);

nlohmann::json read_json_file(const std::filesystem::path& path);

nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

}  // namespace fbmr
