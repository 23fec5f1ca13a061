#include "ppm/simgen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ppm/numeric.hpp"
#include "ppm/rng.hpp"

namespace ppm {

namespace {
constexpr std::uint64_t kFeatureStream = 0xFEA7;
constexpr std::uint64_t kOutcomeStream = 0x00C0DE;
}  // namespace

void SimulationConfig::validate() const {
  if (n < 1) throw std::invalid_argument("simulation: n must be at least 1");
  if (n_features < 1) throw std::invalid_argument("simulation: n_features must be positive");
  if (n_binary < 0 || n_binary > n_features)
    throw std::invalid_argument("simulation: n_binary outside [0, n_features]");
  if (!(pairwise_correlation >= 0.0 && pairwise_correlation < 1.0))
    throw std::invalid_argument("simulation: pairwise_correlation outside [0,1)");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("simulation: noise_sd must be >= 0");
}

Dataset generate_features(const SimulationConfig& cfg) {
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(cfg.n);
  const std::size_t p = static_cast<std::size_t>(cfg.n_features);
  const std::size_t n_bin = static_cast<std::size_t>(cfg.n_binary);
  const double r = cfg.pairwise_correlation;
  const double shared = std::sqrt(r);
  const double own = std::sqrt(1.0 - r);
  const std::uint64_t stream = derive_seed(cfg.seed, kFeatureStream);

  Dataset ds;
  ds.n_rows = n;
  ds.n_cols = p;
  ds.features.resize(n * p);
  ds.outcomes.assign(n, 0);
  ds.feature_names.resize(p);
  ds.feature_kinds.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    ds.feature_names[j] = "x" + std::to_string(j + 1);
    const bool in_binary_block = cfg.continuous_first ? (j >= p - n_bin) : (j < n_bin);
    ds.feature_kinds[j] = in_binary_block ? FeatureKind::binary : FeatureKind::continuous;
  }

  // Per-row streams keep generation independent of any row blocking.
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(stream, i));
    const double g = rng.normal();
    double* row = ds.features.data() + i * p;
    for (std::size_t j = 0; j < p; ++j) {
      const double latent = shared * g + own * rng.normal();
      row[j] = ds.feature_kinds[j] == FeatureKind::binary ? (latent > 0.0 ? 1.0 : 0.0)
                                                          : latent;
    }
  }
  return ds;
}

double true_linear_predictor(std::span<const double> x, double noise) {
  if (x.size() < 8)
    throw std::invalid_argument("true_linear_predictor: needs at least 8 features");
  return -4.0 * x[0] + x[5] - 2.0 * x[0] * x[2] + 3.0 * std::exp(x[3]) -
         5.0 * std::exp(x[1] * x[7]) + noise;
}

double outcome_probability(double z) { return inv_logit(z); }

Dataset generate_dataset(const SimulationConfig& cfg) {
  Dataset ds = generate_features(cfg);
  const std::uint64_t stream = derive_seed(cfg.seed, kOutcomeStream);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    Rng rng(derive_seed(stream, i));
    const double noise = cfg.noise_sd * rng.normal();
    const double z = true_linear_predictor(ds.row(i), noise);
    const double pi = outcome_probability(z);
    ds.outcomes[i] = rng.uniform01() < pi ? 1 : 0;
  }
  ds.validate();
  return ds;
}

SimulationSummary summarize_simulation(const Dataset& ds) {
  SimulationSummary out;
  double events = 0.0;
  for (int y : ds.outcomes) events += y;
  out.prevalence = events / static_cast<double>(ds.n_rows);

  const std::size_t p = ds.n_cols;
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < ds.n_rows; ++i) s += ds.features[i * p + j];
    mean[j] = s / static_cast<double>(ds.n_rows);
  }
  for (std::size_t j = 0; j < p; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
      const double d = ds.features[i * p + j] - mean[j];
      ss += d * d;
    }
    sd[j] = std::sqrt(ss / static_cast<double>(ds.n_rows));
  }

  double sum_abs = 0.0;
  std::size_t count = 0;
  out.min_observed_correlation = 1.0;
  out.max_observed_correlation = -1.0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      if (sd[a] == 0.0 || sd[b] == 0.0) continue;
      double cov = 0.0;
      for (std::size_t i = 0; i < ds.n_rows; ++i)
        cov += (ds.features[i * p + a] - mean[a]) * (ds.features[i * p + b] - mean[b]);
      const double corr = cov / (static_cast<double>(ds.n_rows) * sd[a] * sd[b]);
      sum_abs += std::abs(corr);
      out.min_observed_correlation = std::min(out.min_observed_correlation, corr);
      out.max_observed_correlation = std::max(out.max_observed_correlation, corr);
      ++count;
    }
  }
  out.mean_observed_abs_correlation = count > 0 ? sum_abs / static_cast<double>(count) : 0.0;
  return out;
}

}  // namespace ppm
