#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppm/dataset.hpp"
#include "ppm/metrics.hpp"
#include "ppm/simgen.hpp"
#include "ppm/tuner.hpp"
#include "ppm/validator.hpp"

namespace ppm {

struct DataSource {
  std::optional<std::string> path;
  std::string outcome = "y";
  std::optional<SimulationConfig> simulation;
};

struct ExperimentConfig {
  DataSource data;
  SplitPlan split;
  TuningConfig tuning;
  std::vector<double> alphas{0.5};
  ValidationConfig validation;
  MetricsConfig metrics;
  long long z_repetitions = 10;
  std::uint64_t master_seed = 12345;

  void validate() const;
};

// Reads a JSON config file. An empty (or whitespace-only) file means "all
// defaults". Unknown keys, type mismatches and invariant violations are
// rejected with the offending key path in the message.
ExperimentConfig parse_config(const std::string& path);

ExperimentConfig parse_config_text(const std::string& text);

// Resolved-config echo used in emitted reports: deterministic and complete.
std::string config_to_json_text(const ExperimentConfig& cfg);

}  // namespace ppm
