#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppm/config.hpp"
#include "ppm/dataset.hpp"
#include "ppm/tuner.hpp"
#include "ppm/validator.hpp"

#include "json.hpp"

namespace ppm {

struct ExperimentCell {
  int repetition = 0;
  double alpha = 0.5;
  std::optional<TuningResult> tuning;
  std::optional<ValidationReport> validation;
  std::string error;  // empty on success
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ExperimentCell> cells;  // one per (repetition, alpha)
};

Dataset load_experiment_dataset(const DataSource& source);

// The full loop: for each of Z outer repetitions, split off a holdout, tune
// every alpha on the training/testing part (one evaluation pass shared
// across the alpha sweep), then externally validate each tuned proportion on
// the holdout. A failing cell records its error and leaves sibling cells
// untouched; only a fully failed run throws.
ExperimentReport run_experiment(const ExperimentConfig& cfg, int threads = 0);

nlohmann::json to_json(const ExperimentReport& report);

// alpha_p_optimal.csv: z,alpha,optimal_m,p_optimal
std::string alpha_p_optimal_csv(const ExperimentReport& report);

// summary_table.csv: one row per (z, alpha) with the tuned proportion and
// point/se/lower/upper per measure.
std::string summary_table_csv(const ExperimentReport& report);

// Writes experiment_report.json, the two summary tables, and per-cell
// tuning/validation files into `outdir`.
void write_experiment_outputs(const ExperimentReport& report, const std::string& outdir);

}  // namespace ppm
