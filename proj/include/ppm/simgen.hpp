#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppm/dataset.hpp"

namespace ppm {

struct SimulationConfig {
  long long n = 16000;
  int n_features = 20;
  int n_binary = 10;
  double pairwise_correlation = 0.2;  // latent-scale equicorrelation, in [0,1)
  double noise_sd = 1.0;
  std::uint64_t seed = 12345;
  // With the default ordering the continuous block comes first (x1..x10
  // continuous, the rest binary), which keeps the outcome prevalence in the
  // moderate range; disable to put the binary block first instead.
  bool continuous_first = true;

  void validate() const;
};

// Latent rows are equicorrelated unit-variance Gaussians built from a shared
// factor: x_j = sqrt(r) g + sqrt(1-r) e_j. Binary columns are the latents
// dichotomized at zero. Deterministic given the seed; the feature stream is
// independent of the outcome stream.
Dataset generate_features(const SimulationConfig& cfg);

// z = -4 x1 + x6 - 2 x1 x3 + 3 exp(x4) - 5 exp(x2 x8) + noise, with 1-based
// feature positions. Requires at least 8 features.
double true_linear_predictor(std::span<const double> x, double noise);

// Overflow-safe 1 / (1 + exp(-z)).
double outcome_probability(double z);

// Features plus Bernoulli outcomes drawn from the model above.
Dataset generate_dataset(const SimulationConfig& cfg);

// Summary statistics reported alongside generated data: correlations are
// attenuated on the observed scale for dichotomized columns.
struct SimulationSummary {
  double prevalence = 0.0;
  double mean_observed_abs_correlation = 0.0;
  double min_observed_correlation = 0.0;
  double max_observed_correlation = 0.0;
};

SimulationSummary summarize_simulation(const Dataset& ds);

}  // namespace ppm
