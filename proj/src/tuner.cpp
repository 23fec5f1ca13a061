#include "ppm/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "ppm/numeric.hpp"
#include "ppm/parallel.hpp"
#include "ppm/pipeline.hpp"
#include "ppm/rng.hpp"

namespace ppm {

std::vector<double> default_m_grid() {
  return {0.02, 0.05, 0.078, 0.1, 0.156, 0.2, 0.3, 0.4, 0.5, 0.642, 0.75, 0.871, 1.0};
}

void TuningConfig::validate(std::size_t n_features) const {
  (void)n_features;
  if (m_grid.empty()) throw std::invalid_argument("tuning: m_grid is empty");
  double prev = 0.0;
  for (double g : m_grid) {
    if (!(g > 0.0 && g <= 1.0))
      throw std::invalid_argument("tuning: m_grid proportions must lie in (0,1]");
    if (g <= prev) throw std::invalid_argument("tuning: m_grid must be strictly increasing");
    prev = g;
  }
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("tuning: alpha outside [0,1]");
  if (k_folds < 2) throw std::invalid_argument("tuning: K must be at least 2");
  if (repeats < 1) throw std::invalid_argument("tuning: v must be at least 1");
  if (min_subpop < 1) throw std::invalid_argument("tuning: min_subpop must be positive");
}

namespace {

struct FoldContext {
  Matrix train_std;                 // standardized training rows
  std::vector<int> y_train;
  std::vector<double> train_norms;
  Matrix test_std;                  // standardized test rows
  std::vector<int> y_test;
};

FoldContext build_fold(const Dataset& trte, std::span<const std::size_t> test_idx,
                       bool standardize) {
  const std::size_t n = trte.n_rows;
  const std::size_t p = trte.n_cols;
  std::vector<char> is_test(n, 0);
  for (std::size_t t : test_idx) is_test[t] = 1;

  FoldContext ctx;
  const std::size_t n_train = n - test_idx.size();
  ctx.train_std = Matrix(n_train, p);
  ctx.y_train.resize(n_train);
  ctx.test_std = Matrix(test_idx.size(), p);
  ctx.y_test.resize(test_idx.size());

  std::size_t ti = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_test[i]) continue;
    std::copy_n(trte.features.data() + i * p, p, ctx.train_std.row(ti));
    ctx.y_train[ti] = trte.outcomes[i];
    ++ti;
  }
  for (std::size_t t = 0; t < test_idx.size(); ++t) {
    std::copy_n(trte.features.data() + test_idx[t] * p, p, ctx.test_std.row(t));
    ctx.y_test[t] = trte.outcomes[test_idx[t]];
  }

  if (standardize) {
    std::vector<double> mean(p, 0.0), scale(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_train; ++i) s += ctx.train_std.row(i)[j];
      mean[j] = s / static_cast<double>(n_train);
    }
    if (n_train >= 2) {
      for (std::size_t j = 0; j < p; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n_train; ++i) {
          const double d = ctx.train_std.row(i)[j] - mean[j];
          ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n_train - 1));
        scale[j] = sd > 0.0 ? sd : 1.0;
      }
    }
    for (std::size_t i = 0; i < n_train; ++i) {
      double* row = ctx.train_std.row(i);
      for (std::size_t j = 0; j < p; ++j) row[j] = (row[j] - mean[j]) / scale[j];
    }
    for (std::size_t t = 0; t < ctx.test_std.rows; ++t) {
      double* row = ctx.test_std.row(t);
      for (std::size_t j = 0; j < p; ++j) row[j] = (row[j] - mean[j]) / scale[j];
    }
  }
  ctx.train_norms = compute_row_norms(ctx.train_std.view());
  return ctx;
}

// Predictions for every (test patient, grid point) of one fold; rows indexed
// by test position, columns by grid point. Parallel over test patients.
void predict_fold(const FoldContext& ctx, std::span<const std::size_t> m_values,
                  const SubpopPredictOptions& options, int threads,
                  std::vector<double>& probs, PipelineCounters& counters) {
  const std::size_t n_test = ctx.test_std.rows;
  const std::size_t n_grid = m_values.size();
  probs.assign(n_test * n_grid, 0.0);
  std::vector<PipelineCounters> chunk_counters;
  std::mutex counters_mutex;

  parallel_chunks(0, n_test, threads, [&](std::size_t lo, std::size_t hi) {
    PipelineScratch scratch;
    PipelineCounters local;
    for (std::size_t t = lo; t < hi; ++t) {
      predict_index_patient(ctx.train_std.view(), ctx.y_train, ctx.train_norms,
                            ctx.test_std.row(t), m_values, options,
                            std::span<double>(probs.data() + t * n_grid, n_grid), local,
                            scratch);
    }
    std::lock_guard<std::mutex> lock(counters_mutex);
    chunk_counters.push_back(local);
  });
  for (const auto& c : chunk_counters) {
    counters.skipped += c.skipped;
    counters.nonconverged += c.nonconverged;
  }
}

double loss_from_terms(double cal, double ref, double alpha, LossKind kind) {
  return kind == LossKind::brier ? cal + ref : mixture_loss_from_terms(cal, ref, alpha);
}

}  // namespace

GridEvaluation evaluate_grid(const Dataset& trte, const TuningConfig& cfg, int threads) {
  trte.validate();
  cfg.validate(trte.n_cols);
  const std::size_t n = trte.n_rows;
  const std::size_t k = static_cast<std::size_t>(cfg.k_folds);
  if (k > n) throw std::invalid_argument("tuning: K exceeds sample size");

  if (static_cast<long long>(cfg.repeats) * cfg.k_folds < 200)
    std::fprintf(stderr,
                 "warning: v*K = %d is below the recommended 200 repeated-fold "
                 "evaluations\n",
                 cfg.repeats * cfg.k_folds);

  const std::size_t max_fold = (n + k - 1) / k;  // ceil(n/K)
  const std::size_t n_train_ref = n - max_fold;
  const std::size_t floor_m =
      std::max<std::size_t>(static_cast<std::size_t>(cfg.min_subpop), trte.n_cols + 2);

  GridEvaluation ev;
  ev.proportions = cfg.m_grid;
  ev.n_train_ref = n_train_ref;
  ev.n_evaluations = cfg.repeats * cfg.k_folds;
  const std::size_t n_grid = cfg.m_grid.size();
  ev.m_repr.resize(n_grid);
  ev.feasible.resize(n_grid);
  for (std::size_t g = 0; g < n_grid; ++g) {
    const std::size_t m_ref = scaled_ceil(cfg.m_grid[g], n_train_ref);
    ev.m_repr[g] = static_cast<long long>(m_ref);
    ev.feasible[g] = m_ref >= floor_m && m_ref <= n_train_ref ? 1 : 0;
  }
  if (std::none_of(ev.feasible.begin(), ev.feasible.end(), [](char f) { return f != 0; }))
    throw std::runtime_error("tuning: all grid points infeasible");

  std::vector<std::size_t> feasible_idx;
  for (std::size_t g = 0; g < n_grid; ++g)
    if (ev.feasible[g]) feasible_idx.push_back(g);

  ev.calibration_terms.assign(n_grid, {});
  ev.refinement_terms.assign(n_grid, {});
  for (std::size_t g : feasible_idx) {
    ev.calibration_terms[g].reserve(ev.n_evaluations);
    ev.refinement_terms[g].reserve(ev.n_evaluations);
  }

  SubpopPredictOptions options;
  options.scheme = cfg.weight_scheme;
  options.fit = cfg.fit;
  options.min_events_per_class = cfg.min_events_per_class;

  PipelineCounters counters;
  std::vector<double> probs;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const std::uint64_t fold_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    const auto folds = kfold_partition(n, cfg.k_folds, fold_seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const FoldContext ctx = build_fold(trte, folds[f], cfg.standardize);
      const std::size_t n_train = ctx.train_std.rows;

      std::vector<std::size_t> m_values(feasible_idx.size());
      for (std::size_t gi = 0; gi < feasible_idx.size(); ++gi)
        m_values[gi] = std::min(scaled_ceil(cfg.m_grid[feasible_idx[gi]], n_train), n_train);

      predict_fold(ctx, m_values, options, threads, probs, counters);

      const std::size_t n_test = ctx.test_std.rows;
      for (std::size_t gi = 0; gi < feasible_idx.size(); ++gi) {
        double cal = 0.0, ref = 0.0;
        for (std::size_t t = 0; t < n_test; ++t) {
          const double pk = probs[t * m_values.size() + gi];
          cal += (ctx.y_test[t] - pk) * (1.0 - 2.0 * pk);
          ref += pk * (1.0 - pk);
        }
        ev.calibration_terms[feasible_idx[gi]].push_back(cal / double(n_test));
        ev.refinement_terms[feasible_idx[gi]].push_back(ref / double(n_test));
      }
    }
  }
  ev.skipped = counters.skipped;
  ev.nonconverged = counters.nonconverged;
  return ev;
}

TuningResult finalize_tuning(const GridEvaluation& ev, double alpha, LossKind kind) {
  TuningResult result;
  result.alpha = alpha;
  result.n_train_ref = ev.n_train_ref;
  result.skipped = ev.skipped;
  result.nonconverged = ev.nonconverged;

  const std::size_t n_grid = ev.proportions.size();
  result.loss_curve.resize(n_grid);
  std::ptrdiff_t best = -1;
  for (std::size_t g = 0; g < n_grid; ++g) {
    LossCurvePoint& pt = result.loss_curve[g];
    pt.m = ev.m_repr[g];
    pt.proportion = ev.proportions[g];
    pt.feasible = ev.feasible[g] != 0;
    if (!pt.feasible) {
      pt.mean_loss = std::numeric_limits<double>::quiet_NaN();
      pt.se_loss = std::numeric_limits<double>::quiet_NaN();
      pt.n_evaluations = 0;
      continue;
    }
    const auto& cal = ev.calibration_terms[g];
    const auto& ref = ev.refinement_terms[g];
    std::vector<double> losses(cal.size());
    for (std::size_t e = 0; e < cal.size(); ++e)
      losses[e] = loss_from_terms(cal[e], ref[e], alpha, kind);
    const auto ms = sample_mean_sd(losses);
    pt.mean_loss = ms.mean;
    pt.se_loss = losses.size() > 1 ? ms.sd / std::sqrt(double(losses.size())) : 0.0;
    pt.n_evaluations = static_cast<int>(losses.size());
    if (best < 0 || pt.mean_loss < result.loss_curve[best].mean_loss)
      best = static_cast<std::ptrdiff_t>(g);
  }
  if (best < 0) throw std::runtime_error("tuning: all grid points infeasible");
  result.optimal_m = result.loss_curve[best].m;
  result.p_optimal =
      static_cast<double>(result.optimal_m) / static_cast<double>(ev.n_train_ref);
  return result;
}

TuningResult tune_subpopulation_size(const Dataset& trte, const TuningConfig& cfg,
                                     int threads) {
  return finalize_tuning(evaluate_grid(trte, cfg, threads), cfg.alpha, cfg.loss_kind);
}

std::vector<TuningResult> tune_alpha_sweep(const Dataset& trte, const TuningConfig& cfg,
                                           std::span<const double> alphas, int threads) {
  const GridEvaluation ev = evaluate_grid(trte, cfg, threads);
  std::vector<TuningResult> results;
  results.reserve(alphas.size());
  for (double a : alphas) results.push_back(finalize_tuning(ev, a, cfg.loss_kind));
  return results;
}

CandidateEvaluation evaluate_candidate(const Dataset& trte,
                                       const std::vector<std::vector<std::size_t>>& folds,
                                       std::size_t m, const TuningConfig& cfg,
                                       int threads) {
  trte.validate();
  if (folds.empty()) throw std::invalid_argument("evaluate_candidate: no folds");

  const std::size_t floor_m =
      std::max<std::size_t>(static_cast<std::size_t>(cfg.min_subpop), trte.n_cols + 2);
  std::size_t min_train = trte.n_rows;
  for (const auto& f : folds) min_train = std::min(min_train, trte.n_rows - f.size());

  CandidateEvaluation out;
  if (m < floor_m || m > min_train) return out;  // infeasible, excluded from argmin
  out.feasible = true;

  SubpopPredictOptions options;
  options.scheme = cfg.weight_scheme;
  options.fit = cfg.fit;
  options.min_events_per_class = cfg.min_events_per_class;

  PipelineCounters counters;
  std::vector<double> probs;
  const std::size_t m_values[1] = {m};
  for (const auto& test_idx : folds) {
    const FoldContext ctx = build_fold(trte, test_idx, cfg.standardize);
    predict_fold(ctx, m_values, options, threads, probs, counters);
    PredictionSet ps;
    ps.y = ctx.y_test;
    ps.p = probs;
    const auto terms = brier_decomposition(ps);
    out.fold_losses.push_back(
        loss_from_terms(terms.calibration_term, terms.refinement_term, cfg.alpha,
                        cfg.loss_kind));
  }
  out.skipped = counters.skipped;
  double s = 0.0;
  for (double v : out.fold_losses) s += v;
  out.mean_loss = s / static_cast<double>(out.fold_losses.size());
  return out;
}

std::vector<MSweepPoint> m_sweep(const Dataset& trte, const TuningConfig& cfg,
                                 const MetricsConfig& metrics, int threads) {
  trte.validate();
  cfg.validate(trte.n_cols);
  const std::size_t n = trte.n_rows;
  const std::size_t k = static_cast<std::size_t>(cfg.k_folds);
  if (k > n) throw std::invalid_argument("sweep: K exceeds sample size");

  const std::size_t max_fold = (n + k - 1) / k;
  const std::size_t n_train_ref = n - max_fold;
  const std::size_t floor_m =
      std::max<std::size_t>(static_cast<std::size_t>(cfg.min_subpop), trte.n_cols + 2);

  const std::size_t n_grid = cfg.m_grid.size();
  std::vector<MSweepPoint> points(n_grid);
  std::vector<std::size_t> feasible_idx;
  for (std::size_t g = 0; g < n_grid; ++g) {
    points[g].proportion = cfg.m_grid[g];
    const std::size_t m_ref = scaled_ceil(cfg.m_grid[g], n_train_ref);
    points[g].m = static_cast<long long>(m_ref);
    points[g].feasible = m_ref >= floor_m && m_ref <= n_train_ref;
    if (points[g].feasible) feasible_idx.push_back(g);
  }
  if (feasible_idx.empty()) throw std::runtime_error("sweep: all grid points infeasible");

  SubpopPredictOptions options;
  options.scheme = cfg.weight_scheme;
  options.fit = cfg.fit;
  options.min_events_per_class = cfg.min_events_per_class;

  // Pool predictions over every repetition and fold, per grid point.
  std::vector<PredictionSet> pools(feasible_idx.size());
  PipelineCounters counters;
  std::vector<double> probs;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const std::uint64_t fold_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    const auto folds = kfold_partition(n, cfg.k_folds, fold_seed);
    for (const auto& test_idx : folds) {
      const FoldContext ctx = build_fold(trte, test_idx, cfg.standardize);
      const std::size_t n_train = ctx.train_std.rows;
      std::vector<std::size_t> m_values(feasible_idx.size());
      for (std::size_t gi = 0; gi < feasible_idx.size(); ++gi)
        m_values[gi] = std::min(scaled_ceil(cfg.m_grid[feasible_idx[gi]], n_train), n_train);
      predict_fold(ctx, m_values, options, threads, probs, counters);
      for (std::size_t gi = 0; gi < feasible_idx.size(); ++gi) {
        for (std::size_t t = 0; t < ctx.test_std.rows; ++t) {
          pools[gi].y.push_back(ctx.y_test[t]);
          pools[gi].p.push_back(probs[t * m_values.size() + gi]);
        }
      }
    }
  }
  for (std::size_t gi = 0; gi < feasible_idx.size(); ++gi)
    points[feasible_idx[gi]].report = full_report(pools[gi], metrics);
  return points;
}

}  // namespace ppm
