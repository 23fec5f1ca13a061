#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppm/dataset.hpp"
#include "ppm/glm.hpp"
#include "ppm/metrics.hpp"
#include "ppm/similarity.hpp"

namespace ppm {

struct ValidationConfig {
  long long b_replicates = 1000;  // >= 2
  double p_optimal = 1.0;         // in (0,1]
  double inner_split = 0.8;       // training share of each bootstrap sample
  WeightScheme weight_scheme = WeightScheme::uniform;
  double alpha_level = 0.95;
  std::uint64_t seed = 12345;
  FitConfig fit;
  MetricsConfig metrics;
  int min_events_per_class = 5;
  bool standardize = true;

  void validate() const;
};

enum class IntervalMethod { bca, percentile_fallback };

std::string to_string(IntervalMethod method);

struct ConfidenceInterval {
  double point = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  IntervalMethod method = IntervalMethod::bca;
};

// Bias-corrected and accelerated bootstrap interval. `point` centers the
// bias correction; `jackknife_values` feed the acceleration (empty gives
// a = 0). Degenerate replicate sets collapse to [point, point]; an infinite
// bias correction falls back to the plain percentile interval.
ConfidenceInterval bca_interval(std::span<const double> replicates,
                                std::span<const double> jackknife_values, double point,
                                double level);

struct MeasureValidation {
  std::string measure;
  std::optional<double> reference;  // value from the un-resampled holdout run
  std::optional<ConfidenceInterval> interval;
  long long n_values = 0;   // replicates where the measure was defined
  long long n_missing = 0;  // b_replicates - n_values
};

struct ValidationReport {
  long long b_replicates = 0;
  long long n_failed_replicates = 0;
  double p_optimal = 0.0;
  std::vector<MeasureValidation> measures;
  // indexed [measure][replicate]; absent when the replicate failed or the
  // measure was undefined there
  std::vector<std::vector<std::optional<double>>> replicate_values;
};

// One bootstrap replicate: resample the holdout with replacement, split it
// into inner training/testing parts (stratified by outcome), set
// M = ceil(n_train * p_optimal), and score every inner test patient with its
// personalized model. Returns nothing when no valid resample is found within
// ten attempts.
std::optional<PerformanceReport> run_bootstrap_replicate(const Dataset& holdout,
                                                         const ValidationConfig& cfg,
                                                         std::uint64_t replicate_seed);

// B bootstrap replicates plus a reference (un-resampled) run; per-measure
// point estimate is the replicate mean, the BCa interval is centered on the
// reference value, and acceleration comes from leave-one-patient-out
// jackknifing of the reference run's pooled predictions. Throws
// "validation unstable" when more than 20% of replicates fail.
ValidationReport external_validate(const Dataset& holdout, const ValidationConfig& cfg,
                                   int threads = 0);

}  // namespace ppm
