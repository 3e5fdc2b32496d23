#pragma once

// JSON config parsing and validation. Every run is fully described by one
// nested document; parsing resolves all defaults and echoes the resolved
// document back, so a run can be reproduced from its manifest alone.

#include <string>

#include "acdb/experiments.hpp"

namespace acdb {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : std::runtime_error(key_path + ": " + message), key(std::move(key_path)) {}
  std::string key;
};

struct ExperimentParams {
  // contdep
  PerturbationSpec contdep_spec;
  std::vector<double> amplitudes{1e-1, 1e-2, 1e-3};
  // sweeps
  std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> nu_list{1e-1, 1e-2, 1e-3};
  // mms
  std::vector<MmsLevel> levels{{32, 32, 4e-3}, {64, 64, 1e-3}, {128, 128, 2.5e-4}};
  std::vector<double> temporal_dts{4e-3, 2e-3, 1e-3};
  double x_phase = 0.0;
};

struct ResolvedConfig {
  SolverConfig solver;
  ExperimentParams experiment;
  std::string echo;  // resolved document, serialized
};

// Parse + validate + resolve defaults. Throws ConfigError with the offending
// key path; file-level parse errors carry nlohmann's line/byte diagnostics.
ResolvedConfig parse_config_file(const std::string& path);
ResolvedConfig parse_config_text(const std::string& text);

}  // namespace acdb
