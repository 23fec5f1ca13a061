#include "ppm/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ppm {

WeightScheme weight_scheme_from_string(const std::string& name) {
  if (name == "uniform") return WeightScheme::uniform;
  if (name == "half_tricube") return WeightScheme::half_tricube;
  if (name == "anti_similar") return WeightScheme::anti_similar;
  throw std::invalid_argument("unknown weight_scheme \"" + name + "\"");
}

std::string to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::half_tricube: return "half_tricube";
    case WeightScheme::anti_similar: return "anti_similar";
  }
  return "uniform";
}

namespace {

double clamp_score(double s) { return std::min(1.0, std::max(-1.0, s)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0)
    throw std::domain_error("cosine_similarity: undefined similarity for zero-norm vector");
  return clamp_score(dot(a, b) / (na * nb));
}

std::vector<double> compute_row_norms(MatrixView m) {
  std::vector<double> norms(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto r = m.row(i);
    norms[i] = std::sqrt(dot(r, r));
  }
  return norms;
}

SimilarityRanking rank_by_similarity(std::span<const double> index_patient,
                                     MatrixView train,
                                     std::span<const double> train_norms) {
  if (index_patient.size() != train.cols)
    throw std::invalid_argument("rank_by_similarity: dimension mismatch");
  const double index_norm = std::sqrt(dot(index_patient, index_patient));
  if (index_norm == 0.0)
    throw std::domain_error("rank_by_similarity: index patient has zero norm");

  std::vector<double> norms_local;
  if (train_norms.empty()) {
    norms_local = compute_row_norms(train);
    train_norms = norms_local;
  }

  SimilarityRanking ranking;
  ranking.scores.resize(train.rows);
  ranking.order.resize(train.rows);
  std::vector<double> by_patient(train.rows);
  for (std::size_t k = 0; k < train.rows; ++k) {
    if (train_norms[k] == 0.0) {
      by_patient[k] = -1.0;
      ++ranking.zero_norm_count;
    } else {
      by_patient[k] = clamp_score(dot(index_patient, train.row(k)) /
                                  (index_norm * train_norms[k]));
    }
  }
  std::iota(ranking.order.begin(), ranking.order.end(), std::uint32_t{0});
  std::sort(ranking.order.begin(), ranking.order.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              if (by_patient[a] != by_patient[b]) return by_patient[a] > by_patient[b];
              return a < b;
            });
  for (std::size_t i = 0; i < train.rows; ++i) ranking.scores[i] = by_patient[ranking.order[i]];
  return ranking;
}

Subpopulation select_top_m(const SimilarityRanking& ranking, std::size_t m) {
  if (m < 1 || m > ranking.size())
    throw std::invalid_argument("select_top_m: M out of range");
  Subpopulation sub;
  sub.member_indices.assign(ranking.order.begin(), ranking.order.begin() + m);
  sub.weights.assign(m, 1.0);
  return sub;
}

double half_tricube_weight(std::size_t rank_position, std::size_t m) {
  const double u = static_cast<double>(rank_position) / static_cast<double>(m);
  const double t = 1.0 - u * u * u;
  return t * t * t;
}

Subpopulation apply_weights(const Subpopulation& sub, const SimilarityRanking& ranking,
                            WeightScheme scheme) {
  const std::size_t m = sub.size();
  if (m > ranking.size() ||
      !std::equal(sub.member_indices.begin(), sub.member_indices.end(),
                  ranking.order.begin()))
    throw std::invalid_argument("apply_weights: subpopulation is not a ranking prefix");

  Subpopulation out = sub;
  switch (scheme) {
    case WeightScheme::uniform:
      std::fill(out.weights.begin(), out.weights.end(), 1.0);
      break;
    case WeightScheme::half_tricube:
      for (std::size_t r = 0; r < m; ++r) out.weights[r] = half_tricube_weight(r, m);
      break;
    case WeightScheme::anti_similar:
      for (std::size_t r = 0; r < m; ++r)
        out.weights[r] = half_tricube_weight(m - 1 - r, m);
      break;
  }
  return out;
}

}  // namespace ppm
