#include "ppm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppm {

void predict_index_patient(MatrixView train, std::span<const int> y_train,
                           std::span<const double> train_norms,
                           std::span<const double> x_index,
                           std::span<const std::size_t> m_values,
                           const SubpopPredictOptions& options,
                           std::span<double> out_probs, PipelineCounters& counters,
                           PipelineScratch& scratch) {
  if (out_probs.size() != m_values.size())
    throw std::invalid_argument("predict_index_patient: output size mismatch");
  if (m_values.empty()) return;

  SimilarityRanking ranking;
  try {
    ranking = rank_by_similarity(x_index, train, train_norms);
  } catch (const std::domain_error&) {
    // zero-norm index patient: no usable similarity, predict the pool mean
    double mean = 0.0;
    for (int v : y_train) mean += v;
    mean /= static_cast<double>(y_train.size());
    for (auto& p : out_probs) p = mean;
    counters.skipped += static_cast<long long>(m_values.size());
    return;
  }

  const std::size_t p = train.cols;
  const std::size_t m_max = m_values.back();
  if (m_max > train.rows)
    throw std::invalid_argument("predict_index_patient: M exceeds training pool");

  // Event counts over ranking prefixes; subpopulations are nested, so one
  // pass answers the class-balance question for every M.
  scratch.event_prefix.assign(m_max + 1, 0);
  for (std::size_t r = 0; r < m_max; ++r)
    scratch.event_prefix[r + 1] =
        scratch.event_prefix[r] + static_cast<std::size_t>(y_train[ranking.order[r]]);

  scratch.design.resize(m_max * p);
  scratch.y_sub.resize(m_max);
  std::size_t gathered = 0;

  const std::size_t min_per_class =
      static_cast<std::size_t>(std::max(1, options.min_events_per_class));

  for (std::size_t g = 0; g < m_values.size(); ++g) {
    const std::size_t m = m_values[g];
    const std::size_t events = scratch.event_prefix[m];
    const std::size_t nonevents = m - events;

    if (events < min_per_class || nonevents < min_per_class) {
      out_probs[g] = static_cast<double>(events) / static_cast<double>(m);
      ++counters.skipped;
      continue;
    }

    while (gathered < m) {
      const std::uint32_t idx = ranking.order[gathered];
      std::copy_n(train.data + static_cast<std::size_t>(idx) * p, p,
                  scratch.design.data() + gathered * p);
      scratch.y_sub[gathered] = y_train[idx];
      ++gathered;
    }

    scratch.weights.resize(m);
    switch (options.scheme) {
      case WeightScheme::uniform:
        std::fill(scratch.weights.begin(), scratch.weights.end(), 1.0);
        break;
      case WeightScheme::half_tricube:
        for (std::size_t r = 0; r < m; ++r) scratch.weights[r] = half_tricube_weight(r, m);
        break;
      case WeightScheme::anti_similar:
        for (std::size_t r = 0; r < m; ++r)
          scratch.weights[r] = half_tricube_weight(m - 1 - r, m);
        break;
    }

    const MatrixView design{scratch.design.data(), m, p};
    const auto fit = fit_weighted_logistic(
        design, std::span<const int>(scratch.y_sub.data(), m), scratch.weights,
        options.fit);
    if (!fit.diagnostics.converged) ++counters.nonconverged;
    out_probs[g] = predict_prob(fit.coefficients, x_index);
  }
}

}  // namespace ppm
