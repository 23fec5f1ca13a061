#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppm/glm.hpp"
#include "ppm/matrix.hpp"
#include "ppm/similarity.hpp"

namespace ppm {

// How a single personalized prediction is produced: rank the training pool
// by similarity, keep the top M, weight, fit a logistic model, predict.
struct SubpopPredictOptions {
  WeightScheme scheme = WeightScheme::uniform;
  FitConfig fit;
  // Below this many events (or non-events) in the subpopulation the model
  // fit is replaced by the subpopulation outcome mean and counted as a skip.
  int min_events_per_class = 5;
};

struct PipelineCounters {
  long long skipped = 0;        // mean-fallback predictions
  long long nonconverged = 0;   // fits that hit the iteration cap
};

// Reusable per-worker buffers.
struct PipelineScratch {
  std::vector<double> design;
  std::vector<int> y_sub;
  std::vector<double> weights;
  std::vector<std::size_t> event_prefix;
};

// Predicts the outcome probability of one index patient for each
// subpopulation size in `m_values` (ascending, each in [1, train.rows]).
// Writes into out_probs (same length as m_values).
void predict_index_patient(MatrixView train, std::span<const int> y_train,
                           std::span<const double> train_norms,
                           std::span<const double> x_index,
                           std::span<const std::size_t> m_values,
                           const SubpopPredictOptions& options,
                           std::span<double> out_probs, PipelineCounters& counters,
                           PipelineScratch& scratch);

}  // namespace ppm
