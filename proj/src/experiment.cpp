#include "ppm/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "ppm/reports.hpp"
#include "ppm/rng.hpp"

namespace ppm {

using nlohmann::json;

namespace {
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kTuneStream = 2;
constexpr std::uint64_t kValidateStream = 3;
}  // namespace

Dataset load_experiment_dataset(const DataSource& source) {
  if (source.path) return load_csv(*source.path, source.outcome);
  if (source.simulation) return generate_dataset(*source.simulation);
  throw std::runtime_error("experiment: no data source (set data.path or simulation)");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const Dataset ds = load_experiment_dataset(cfg.data);

  ExperimentReport report;
  report.config = cfg;
  std::size_t failures = 0;

  for (long long z = 0; z < cfg.z_repetitions; ++z) {
    const std::uint64_t seed_z = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(z));

    std::vector<ExperimentCell> cells(cfg.alphas.size());
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
      cells[a].repetition = static_cast<int>(z);
      cells[a].alpha = cfg.alphas[a];
    }

    try {
      SplitPlan plan = cfg.split;
      plan.seed = derive_seed(seed_z, kSplitStream);
      const HoldoutSplit split = split_holdout(ds, plan);

      TuningConfig tuning = cfg.tuning;
      tuning.seed = derive_seed(seed_z, kTuneStream);
      const GridEvaluation evaluation = evaluate_grid(split.trte, tuning, threads);

      for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
        try {
          const TuningResult tuned =
              finalize_tuning(evaluation, cfg.alphas[a], tuning.loss_kind);
          cells[a].tuning = tuned;
          ValidationConfig vcfg = cfg.validation;
          vcfg.seed = derive_seed(seed_z, kValidateStream);
          vcfg.p_optimal = tuned.p_optimal;
          cells[a].validation = external_validate(split.holdout, vcfg, threads);
        } catch (const std::exception& e) {
          cells[a].error = e.what();
          ++failures;
        }
      }
    } catch (const std::exception& e) {
      for (auto& cell : cells) {
        cell.error = e.what();
        ++failures;
      }
    }
    for (auto& cell : cells) report.cells.push_back(std::move(cell));
  }

  if (failures == report.cells.size())
    throw std::runtime_error("experiment: every (repetition, alpha) cell failed");
  if (failures > 0)
    std::fprintf(stderr, "warning: %zu of %zu experiment cells failed\n", failures,
                 report.cells.size());
  return report;
}

json to_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json c;
    c["z"] = cell.repetition;
    c["alpha"] = cell.alpha;
    c["tuning"] = cell.tuning ? to_json(*cell.tuning) : json(nullptr);
    c["validation"] = cell.validation ? to_json(*cell.validation) : json(nullptr);
    c["error"] = cell.error.empty() ? json(nullptr) : json(cell.error);
    cells.push_back(c);
  }
  json out;
  out["config"] = json::parse(config_to_json_text(report.config));
  out["cells"] = cells;
  return out;
}

std::string alpha_p_optimal_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "z,alpha,optimal_m,p_optimal\n";
  for (const auto& cell : report.cells) {
    if (!cell.tuning) continue;
    out << cell.repetition << ',' << format_double(cell.alpha) << ','
        << cell.tuning->optimal_m << ',' << format_double(cell.tuning->p_optimal) << '\n';
  }
  return out.str();
}

std::string summary_table_csv(const ExperimentReport& report) {
  const auto names = report_measure_names();
  std::ostringstream out;
  out << "z,alpha,proportion";
  for (const auto& name : names)
    out << ',' << name << "_point," << name << "_se," << name << "_lower," << name
        << "_upper";
  out << '\n';
  for (const auto& cell : report.cells) {
    if (!cell.tuning || !cell.validation) continue;
    out << cell.repetition << ',' << format_double(cell.alpha) << ','
        << format_double(cell.tuning->p_optimal);
    for (const auto& name : names) {
      const MeasureValidation* found = nullptr;
      for (const auto& mv : cell.validation->measures)
        if (mv.measure == name) found = &mv;
      if (found && found->interval) {
        out << ',' << format_double(found->interval->point) << ','
            << format_double(found->interval->se) << ','
            << format_double(found->interval->lower) << ','
            << format_double(found->interval->upper);
      } else {
        out << ",,,,";
      }
    }
    out << '\n';
  }
  return out.str();
}

void write_experiment_outputs(const ExperimentReport& report, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  const std::filesystem::path dir(outdir);

  write_text_file((dir / "experiment_report.json").string(), to_json(report).dump(2) + "\n");
  write_text_file((dir / "alpha_p_optimal.csv").string(), alpha_p_optimal_csv(report));
  write_text_file((dir / "summary_table.csv").string(), summary_table_csv(report));

  for (const auto& cell : report.cells) {
    std::ostringstream stem;
    stem << "z" << cell.repetition << "_alpha" << format_double(cell.alpha);
    if (cell.tuning) {
      write_text_file((dir / ("tuning_" + stem.str() + ".json")).string(),
                      to_json(*cell.tuning).dump(2) + "\n");
      write_text_file((dir / ("loss_curve_" + stem.str() + ".csv")).string(),
                      loss_curve_csv(*cell.tuning));
    }
    if (cell.validation) {
      write_text_file((dir / ("validation_" + stem.str() + ".json")).string(),
                      to_json(*cell.validation).dump(2) + "\n");
      write_text_file((dir / ("replicates_" + stem.str() + ".csv")).string(),
                      replicates_csv(*cell.validation));
    }
  }
}

}  // namespace ppm
