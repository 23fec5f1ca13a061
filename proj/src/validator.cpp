#include "ppm/validator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "ppm/numeric.hpp"
#include "ppm/parallel.hpp"
#include "ppm/pipeline.hpp"
#include "ppm/rng.hpp"

namespace ppm {

void ValidationConfig::validate() const {
  if (b_replicates < 2) throw std::invalid_argument("validation: B must be at least 2");
  if (!(p_optimal > 0.0 && p_optimal <= 1.0))
    throw std::invalid_argument("validation: p_optimal outside (0,1]");
  if (!(inner_split > 0.0 && inner_split < 1.0))
    throw std::invalid_argument("validation: inner_split outside (0,1)");
  if (!(alpha_level > 0.0 && alpha_level < 1.0))
    throw std::invalid_argument("validation: alpha_level outside (0,1)");
}

std::string to_string(IntervalMethod method) {
  return method == IntervalMethod::bca ? "BCa" : "percentile-fallback";
}

ConfidenceInterval bca_interval(std::span<const double> replicates,
                                std::span<const double> jackknife_values, double point,
                                double level) {
  if (replicates.size() < 2)
    throw std::invalid_argument("bca_interval: needs at least 2 replicates");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("bca_interval: level outside (0,1)");

  std::vector<double> sorted(replicates.begin(), replicates.end());
  std::sort(sorted.begin(), sorted.end());

  ConfidenceInterval ci;
  ci.point = point;
  ci.se = sample_mean_sd(sorted).sd;

  if (sorted.front() == sorted.back()) {
    ci.lower = point;
    ci.upper = point;
    ci.method = IntervalMethod::percentile_fallback;
    return ci;
  }

  const double b = static_cast<double>(sorted.size());
  double below = 0.0;
  double equal = 0.0;
  for (double v : sorted) {
    if (v < point) ++below;
    else if (v == point) ++equal;
  }
  const double frac = (below + 0.5 * equal) / b;

  auto percentile_fallback = [&](const char* why) {
    std::fprintf(stderr, "warning: %s, falling back to percentile interval\n", why);
    ci.lower = quantile_type7(sorted, (1.0 - level) / 2.0);
    ci.upper = quantile_type7(sorted, (1.0 + level) / 2.0);
    ci.method = IntervalMethod::percentile_fallback;
    return ci;
  };

  if (frac <= 0.0 || frac >= 1.0)
    return percentile_fallback("BCa bias correction undefined (point outside replicate range)");
  const double z0 = norm_quantile(frac);

  double accel = 0.0;
  if (jackknife_values.size() >= 2) {
    double mean = 0.0;
    for (double v : jackknife_values) mean += v;
    mean /= static_cast<double>(jackknife_values.size());
    double s2 = 0.0, s3 = 0.0;
    for (double v : jackknife_values) {
      const double d = mean - v;
      s2 += d * d;
      s3 += d * d * d;
    }
    if (s2 > 0.0) accel = s3 / (6.0 * std::pow(s2, 1.5));
  }

  // With no bias correction and no acceleration the endpoint adjustment is
  // the identity, so use the nominal tail levels directly; this makes the
  // reduction to the percentile interval exact.
  double a_lo, a_hi;
  if (z0 == 0.0 && accel == 0.0) {
    a_lo = (1.0 - level) / 2.0;
    a_hi = (1.0 + level) / 2.0;
  } else {
    const double z_lo = norm_quantile((1.0 - level) / 2.0);
    const double z_hi = -z_lo;
    const double d_lo = 1.0 - accel * (z0 + z_lo);
    const double d_hi = 1.0 - accel * (z0 + z_hi);
    if (d_lo <= 0.0 || d_hi <= 0.0)
      return percentile_fallback("BCa acceleration adjustment degenerate");
    a_lo = norm_cdf(z0 + (z0 + z_lo) / d_lo);
    a_hi = norm_cdf(z0 + (z0 + z_hi) / d_hi);
  }
  ci.lower = quantile_type7(sorted, a_lo);
  ci.upper = quantile_type7(sorted, a_hi);
  if (ci.lower > ci.upper) std::swap(ci.lower, ci.upper);
  ci.method = IntervalMethod::bca;
  return ci;
}

namespace {

struct InnerSplit {
  std::vector<std::size_t> train;  // row indices into the holdout
  std::vector<std::size_t> test;
};

// Stratified split of the sampled rows; requires at least two members per
// class so both parts see both classes.
std::optional<InnerSplit> stratified_split(std::span<const std::size_t> sample,
                                           std::span<const int> outcomes,
                                           double train_share, Rng& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t idx : sample)
    (outcomes[idx] == 1 ? pos : neg).push_back(idx);
  if (pos.size() < 2 || neg.size() < 2) return std::nullopt;

  InnerSplit split;
  for (auto* cls : {&pos, &neg}) {
    rng.shuffle(*cls);
    const std::size_t n_c = cls->size();
    std::size_t tr = round_half_up(train_share * static_cast<double>(n_c));
    tr = std::min(n_c - 1, std::max<std::size_t>(1, tr));
    split.train.insert(split.train.end(), cls->begin(), cls->begin() + tr);
    split.test.insert(split.test.end(), cls->begin() + tr, cls->end());
  }
  return split;
}

// Personalized predictions for every inner test patient of a split, exactly
// as in tuning: standardize on the inner training part, rank, select the top
// M = ceil(n_train * p_optimal), weight, fit, predict.
PredictionSet score_split(const Dataset& holdout, const InnerSplit& split,
                          const ValidationConfig& cfg) {
  const std::size_t p = holdout.n_cols;
  const std::size_t n_train = split.train.size();
  const std::size_t n_test = split.test.size();

  Matrix train(n_train, p);
  std::vector<int> y_train(n_train);
  for (std::size_t i = 0; i < n_train; ++i) {
    std::copy_n(holdout.features.data() + split.train[i] * p, p, train.row(i));
    y_train[i] = holdout.outcomes[split.train[i]];
  }
  Matrix test(n_test, p);
  std::vector<int> y_test(n_test);
  for (std::size_t t = 0; t < n_test; ++t) {
    std::copy_n(holdout.features.data() + split.test[t] * p, p, test.row(t));
    y_test[t] = holdout.outcomes[split.test[t]];
  }

  if (cfg.standardize) {
    std::vector<double> mean(p, 0.0), scale(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_train; ++i) s += train.row(i)[j];
      mean[j] = s / static_cast<double>(n_train);
    }
    if (n_train >= 2) {
      for (std::size_t j = 0; j < p; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n_train; ++i) {
          const double d = train.row(i)[j] - mean[j];
          ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n_train - 1));
        scale[j] = sd > 0.0 ? sd : 1.0;
      }
    }
    for (std::size_t i = 0; i < n_train; ++i) {
      double* row = train.row(i);
      for (std::size_t j = 0; j < p; ++j) row[j] = (row[j] - mean[j]) / scale[j];
    }
    for (std::size_t t = 0; t < n_test; ++t) {
      double* row = test.row(t);
      for (std::size_t j = 0; j < p; ++j) row[j] = (row[j] - mean[j]) / scale[j];
    }
  }

  const std::size_t m =
      std::min(n_train, std::max<std::size_t>(1, scaled_ceil(cfg.p_optimal, n_train)));

  SubpopPredictOptions options;
  options.scheme = cfg.weight_scheme;
  options.fit = cfg.fit;
  options.min_events_per_class = cfg.min_events_per_class;

  const auto train_norms = compute_row_norms(train.view());
  const std::size_t m_values[1] = {m};

  PredictionSet ps;
  ps.y = std::move(y_test);
  ps.p.resize(n_test);
  PipelineCounters counters;
  PipelineScratch scratch;
  const Matrix& test_rows = test;
  for (std::size_t t = 0; t < n_test; ++t) {
    double prob = 0.0;
    predict_index_patient(train.view(), y_train, train_norms, test_rows.row(t), m_values,
                          options, std::span<double>(&prob, 1), counters, scratch);
    ps.p[t] = prob;
  }
  return ps;
}

// Measure on the pooled pairs with patient k removed, for each k. Undefined
// leave-one-out values are dropped.
std::vector<double> jackknife_measure(const PredictionSet& pairs,
                                      const std::string& measure,
                                      const MetricsConfig& metrics) {
  const std::size_t n = pairs.size();
  std::vector<double> out;
  out.reserve(n);
  PredictionSet loo;
  loo.y.resize(n - 1);
  loo.p.resize(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      loo.y[w] = pairs.y[i];
      loo.p[w] = pairs.p[i];
      ++w;
    }
    const auto value = report_measure(full_report(loo, metrics), measure);
    if (value) out.push_back(*value);
  }
  return out;
}

}  // namespace

std::optional<PerformanceReport> run_bootstrap_replicate(const Dataset& holdout,
                                                         const ValidationConfig& cfg,
                                                         std::uint64_t replicate_seed) {
  holdout.validate();
  cfg.validate();
  const std::size_t n = holdout.n_rows;
  Rng rng(replicate_seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i)
      sample[i] = static_cast<std::size_t>(rng.below(n));
    const auto split = stratified_split(sample, holdout.outcomes, cfg.inner_split, rng);
    if (!split) continue;
    return full_report(score_split(holdout, *split, cfg), cfg.metrics);
  }
  return std::nullopt;
}

ValidationReport external_validate(const Dataset& holdout, const ValidationConfig& cfg,
                                   int threads) {
  holdout.validate();
  cfg.validate();

  const auto measure_names = report_measure_names();
  ValidationReport report;
  report.b_replicates = cfg.b_replicates;
  report.p_optimal = cfg.p_optimal;

  // Reference run on the un-resampled holdout: centers the bias correction
  // and provides pooled pairs for the jackknife acceleration.
  bool ref_valid = false;
  PredictionSet ref_pairs;
  PerformanceReport ref_report;
  {
    std::vector<std::size_t> identity(holdout.n_rows);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    for (int attempt = 0; attempt < 10 && !ref_valid; ++attempt) {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(attempt)));
      const auto split =
          stratified_split(identity, holdout.outcomes, cfg.inner_split, rng);
      if (!split) continue;
      ref_pairs = score_split(holdout, *split, cfg);
      ref_report = full_report(ref_pairs, cfg.metrics);
      ref_valid = true;
    }
  }

  const std::size_t b = static_cast<std::size_t>(cfg.b_replicates);
  std::vector<std::optional<PerformanceReport>> replicates(b);
  parallel_chunks(0, b, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      replicates[i] = run_bootstrap_replicate(
          holdout, cfg, derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(i)));
  });

  long long failed = 0;
  for (const auto& r : replicates)
    if (!r) ++failed;
  report.n_failed_replicates = failed;
  if (5 * failed > cfg.b_replicates)
    throw std::runtime_error(
        "external_validate: validation unstable (more than 20% of bootstrap "
        "replicates failed)");

  report.replicate_values.assign(measure_names.size(), {});
  for (std::size_t mi = 0; mi < measure_names.size(); ++mi) {
    auto& column = report.replicate_values[mi];
    column.resize(b);
    for (std::size_t i = 0; i < b; ++i)
      column[i] = replicates[i] ? report_measure(*replicates[i], measure_names[mi])
                                : std::nullopt;
  }

  for (std::size_t mi = 0; mi < measure_names.size(); ++mi) {
    MeasureValidation mv;
    mv.measure = measure_names[mi];
    std::vector<double> values;
    for (const auto& v : report.replicate_values[mi])
      if (v) values.push_back(*v);
    mv.n_values = static_cast<long long>(values.size());
    mv.n_missing = cfg.b_replicates - mv.n_values;
    if (ref_valid) mv.reference = report_measure(ref_report, measure_names[mi]);

    if (values.size() >= 2) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      const double center = mv.reference ? *mv.reference : mean;
      std::vector<double> jack;
      if (ref_valid && ref_pairs.size() >= 3)
        jack = jackknife_measure(ref_pairs, measure_names[mi], cfg.metrics);
      auto ci = bca_interval(values, jack, center, cfg.alpha_level);
      ci.point = mean;  // the reported point estimate is the replicate mean
      mv.interval = ci;
    } else if (values.size() == 1) {
      ConfidenceInterval ci;
      ci.point = values.front();
      ci.lower = ci.upper = values.front();
      ci.method = IntervalMethod::percentile_fallback;
      mv.interval = ci;
    }
    report.measures.push_back(std::move(mv));
  }
  return report;
}

}  // namespace ppm
