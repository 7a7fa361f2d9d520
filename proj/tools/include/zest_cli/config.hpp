#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "zest/experiment.hpp"

namespace zest::cli {

/// Malformed or invalid configuration. Messages carry a line/column position
/// or the dotted key that failed validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates YAML configuration text. `overrides` are applied
/// before validation, each of the form "dotted.key.path=value"; sequence
/// entries are addressed by index, e.g. "estimators.0.annealing.T=5".
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Reads the file and delegates to parse_config. Throws std::ios_base::failure
/// if the file cannot be read.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Accepts decimal numbers plus the tokens inf, +inf, .inf and infinity.
double parse_real(const std::string& token);

}  // namespace zest::cli
