#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ppm/dataset.hpp"
#include "ppm/glm.hpp"
#include "ppm/metrics.hpp"
#include "ppm/similarity.hpp"

namespace ppm {

enum class LossKind { mixture, brier };

struct TuningConfig {
  std::vector<double> m_grid;  // proportions of the training-fold size, ascending in (0,1]
  double alpha = 0.5;
  int k_folds = 10;
  int repeats = 20;  // "v": number of repeated K-fold runs
  WeightScheme weight_scheme = WeightScheme::uniform;
  std::uint64_t seed = 12345;
  FitConfig fit;
  int min_subpop = 20;
  int min_events_per_class = 5;
  bool standardize = true;
  LossKind loss_kind = LossKind::mixture;

  void validate(std::size_t n_features) const;
};

std::vector<double> default_m_grid();

struct LossCurvePoint {
  long long m = 0;           // ceil(proportion * reference training size)
  double proportion = 0.0;
  bool feasible = false;
  double mean_loss = 0.0;    // NaN when infeasible
  double se_loss = 0.0;
  int n_evaluations = 0;
};

struct TuningResult {
  std::vector<LossCurvePoint> loss_curve;
  long long optimal_m = 0;
  double p_optimal = 0.0;
  long long skipped = 0;       // mean-fallback predictions across all fits
  long long nonconverged = 0;
  std::size_t n_train_ref = 0;  // smallest training-fold size
  double alpha = 0.5;
};

// Pooled calibration/refinement Brier terms for every (repetition, fold,
// grid point) evaluation. The mixture loss for any alpha is a linear
// combination of the two stored terms, so one evaluation pass serves a whole
// alpha sweep.
struct GridEvaluation {
  std::vector<double> proportions;
  std::vector<long long> m_repr;
  std::vector<char> feasible;
  std::size_t n_train_ref = 0;
  int n_evaluations = 0;  // repeats * k_folds
  // indexed [grid][evaluation]
  std::vector<std::vector<double>> calibration_terms;
  std::vector<std::vector<double>> refinement_terms;
  long long skipped = 0;
  long long nonconverged = 0;
};

GridEvaluation evaluate_grid(const Dataset& trte, const TuningConfig& cfg,
                             int threads = 0);

TuningResult finalize_tuning(const GridEvaluation& evaluation, double alpha,
                             LossKind kind);

// Full tuning pass: v repeated K-fold evaluations of every grid proportion,
// then the feasible argmin of the mean loss (ties toward smaller M).
TuningResult tune_subpopulation_size(const Dataset& trte, const TuningConfig& cfg,
                                     int threads = 0);

// One evaluation pass shared across several alpha values.
std::vector<TuningResult> tune_alpha_sweep(const Dataset& trte, const TuningConfig& cfg,
                                           std::span<const double> alphas,
                                           int threads = 0);

struct CandidateEvaluation {
  bool feasible = false;
  double mean_loss = 0.0;
  std::vector<double> fold_losses;
  long long skipped = 0;
};

// Mean mixture loss of one integer subpopulation size over an explicit fold
// layout (the same M applied to every fold).
CandidateEvaluation evaluate_candidate(const Dataset& trte,
                                       const std::vector<std::vector<std::size_t>>& folds,
                                       std::size_t m, const TuningConfig& cfg,
                                       int threads = 0);

// Pooled cross-validated performance per grid point, for curve emission.
struct MSweepPoint {
  long long m = 0;
  double proportion = 0.0;
  bool feasible = false;
  PerformanceReport report;
};

std::vector<MSweepPoint> m_sweep(const Dataset& trte, const TuningConfig& cfg,
                                 const MetricsConfig& metrics, int threads = 0);

}  // namespace ppm
