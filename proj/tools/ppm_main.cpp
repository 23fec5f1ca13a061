// ppm: personalized predictive models on similar subpopulations.
//
// Subcommands: simulate, tune, validate, sweep-m, experiment, metrics.
// Data goes to files, progress and warnings to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ppm/config.hpp"
#include "ppm/experiment.hpp"
#include "ppm/reports.hpp"
#include "ppm/rng.hpp"
#include "ppm/simgen.hpp"

namespace {

ppm::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ppm::parse_config_text("");
  return ppm::parse_config(path);
}

ppm::Dataset load_data(const ppm::ExperimentConfig& cfg, const std::string& data_path,
                       const std::string& outcome) {
  ppm::DataSource source = cfg.data;
  if (!data_path.empty()) {
    source.path = data_path;
    source.simulation.reset();
  }
  if (!outcome.empty()) source.outcome = outcome;
  return ppm::load_experiment_dataset(source);
}

ppm::PredictionSet load_pairs(const std::string& path) {
  const ppm::Dataset raw = ppm::load_csv(path, "y");
  std::ptrdiff_t p_col = -1;
  for (std::size_t j = 0; j < raw.feature_names.size(); ++j)
    if (raw.feature_names[j] == "p") p_col = static_cast<std::ptrdiff_t>(j);
  if (p_col < 0) throw std::runtime_error("metrics: pairs file needs a \"p\" column");
  ppm::PredictionSet ps;
  ps.y = raw.outcomes;
  ps.p.resize(raw.n_rows);
  for (std::size_t i = 0; i < raw.n_rows; ++i)
    ps.p[i] = raw.features[i * raw.n_cols + static_cast<std::size_t>(p_col)];
  ps.validate();
  return ps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"personalized predictive models on similar subpopulations"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware)")
      ->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  std::string sim_out = "data.csv";
  simulate->add_option("--config", config_path, "config file (JSON)");
  simulate->add_option("--out", sim_out, "output CSV path")->capture_default_str();

  // tune
  auto* tune = app.add_subcommand("tune", "tune the subpopulation proportion");
  std::string tune_data, tune_outcome, tune_out = "tuning.json", tune_curve;
  tune->add_option("--config", config_path, "config file (JSON)");
  tune->add_option("--data", tune_data, "training/testing CSV");
  tune->add_option("--outcome", tune_outcome, "outcome column name");
  tune->add_option("--out", tune_out, "output JSON path")->capture_default_str();
  tune->add_option("--loss-curve", tune_curve, "loss curve CSV path");

  // validate
  auto* validate = app.add_subcommand("validate", "bootstrap external validation");
  std::string val_data, val_outcome, val_out = "validation_report.json";
  std::string val_replicates = "replicates.csv";
  double val_p_optimal = -1.0;
  validate->add_option("--config", config_path, "config file (JSON)");
  validate->add_option("--data", val_data, "holdout CSV");
  validate->add_option("--outcome", val_outcome, "outcome column name");
  validate->add_option("--p-optimal", val_p_optimal, "tuned subpopulation proportion")
      ->required();
  validate->add_option("--out", val_out, "report JSON path")->capture_default_str();
  validate->add_option("--replicates", val_replicates, "replicates CSV path")
      ->capture_default_str();

  // sweep-m
  auto* sweep = app.add_subcommand("sweep-m", "performance measures across the M grid");
  std::string sweep_data, sweep_outcome, sweep_out = "m_sweep.csv";
  sweep->add_option("--config", config_path, "config file (JSON)");
  sweep->add_option("--data", sweep_data, "training/testing CSV");
  sweep->add_option("--outcome", sweep_outcome, "outcome column name");
  sweep->add_option("--out", sweep_out, "output CSV path")->capture_default_str();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "full tune-and-validate loop");
  std::string exp_out = "experiment_out";
  experiment->add_option("--config", config_path, "config file (JSON)");
  experiment->add_option("--out", exp_out, "output directory")->capture_default_str();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "performance report for (y,p) pairs");
  std::string pairs_path, metrics_out;
  metrics->add_option("--config", config_path, "config file (JSON)");
  metrics->add_option("--pairs", pairs_path, "CSV with y and p columns")->required();
  metrics->add_option("--out", metrics_out, "report JSON path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const ppm::ExperimentConfig cfg = load_config(config_path);

    if (simulate->parsed()) {
      ppm::SimulationConfig sim =
          cfg.data.simulation ? *cfg.data.simulation : ppm::SimulationConfig{};
      const ppm::Dataset ds = ppm::generate_dataset(sim);
      ppm::write_csv(ds, sim_out, "y");
      const auto summary = ppm::summarize_simulation(ds);
      nlohmann::json meta;
      meta["n"] = ds.n_rows;
      meta["n_features"] = ds.n_cols;
      meta["prevalence"] = summary.prevalence;
      meta["observed_correlation"] = {
          {"mean_abs", summary.mean_observed_abs_correlation},
          {"min", summary.min_observed_correlation},
          {"max", summary.max_observed_correlation}};
      meta["latent_pairwise_correlation"] = sim.pairwise_correlation;
      ppm::write_text_file(sim_out + ".meta.json", meta.dump(2) + "\n");
      std::fprintf(stderr, "simulate: wrote %zu rows to %s (prevalence %.3f)\n",
                   ds.n_rows, sim_out.c_str(), summary.prevalence);
    } else if (tune->parsed()) {
      const ppm::Dataset ds = load_data(cfg, tune_data, tune_outcome);
      nlohmann::json out_json;
      if (cfg.alphas.size() == 1) {
        const auto result = ppm::tune_subpopulation_size(ds, cfg.tuning, threads);
        out_json = ppm::to_json(result);
        const std::string curve_path =
            tune_curve.empty()
                ? (std::filesystem::path(tune_out).parent_path() / "loss_curve.csv").string()
                : tune_curve;
        ppm::write_text_file(curve_path, ppm::loss_curve_csv(result));
        std::fprintf(stderr, "tune: optimal_m=%lld p_optimal=%s\n", result.optimal_m,
                     ppm::format_double(result.p_optimal).c_str());
      } else {
        const auto results = ppm::tune_alpha_sweep(ds, cfg.tuning, cfg.alphas, threads);
        out_json = nlohmann::json::array();
        for (std::size_t a = 0; a < results.size(); ++a) {
          out_json.push_back(ppm::to_json(results[a]));
          const std::string curve_path =
              (std::filesystem::path(tune_out).parent_path() /
               ("loss_curve_alpha" + ppm::format_double(cfg.alphas[a]) + ".csv"))
                  .string();
          ppm::write_text_file(curve_path, ppm::loss_curve_csv(results[a]));
        }
      }
      ppm::write_text_file(tune_out, out_json.dump(2) + "\n");
    } else if (validate->parsed()) {
      const ppm::Dataset ds = load_data(cfg, val_data, val_outcome);
      ppm::ValidationConfig vcfg = cfg.validation;
      vcfg.p_optimal = val_p_optimal;
      const auto report = ppm::external_validate(ds, vcfg, threads);
      ppm::write_text_file(val_out, ppm::to_json(report).dump(2) + "\n");
      ppm::write_text_file(val_replicates, ppm::replicates_csv(report));
      std::fprintf(stderr, "validate: %lld replicates, %lld failed\n", report.b_replicates,
                   report.n_failed_replicates);
    } else if (sweep->parsed()) {
      const ppm::Dataset ds = load_data(cfg, sweep_data, sweep_outcome);
      const auto points = ppm::m_sweep(ds, cfg.tuning, cfg.metrics, threads);
      ppm::write_text_file(sweep_out, ppm::m_sweep_csv(points));
      std::fprintf(stderr, "sweep-m: wrote %zu grid points to %s\n", points.size(),
                   sweep_out.c_str());
    } else if (experiment->parsed()) {
      const auto report = ppm::run_experiment(cfg, threads);
      ppm::write_experiment_outputs(report, exp_out);
      std::fprintf(stderr, "experiment: wrote %zu cells to %s\n", report.cells.size(),
                   exp_out.c_str());
    } else if (metrics->parsed()) {
      const auto ps = load_pairs(pairs_path);
      const auto report = ppm::full_report(ps, cfg.metrics);
      const std::string text = ppm::to_json(report).dump(2) + "\n";
      if (metrics_out.empty())
        std::cout << text;
      else
        ppm::write_text_file(metrics_out, text);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
