#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppm/matrix.hpp"

namespace ppm {

enum class WeightScheme { uniform, half_tricube, anti_similar };

WeightScheme weight_scheme_from_string(const std::string& name);
std::string to_string(WeightScheme scheme);

// Training patients ordered by similarity to one index patient: descending
// score, ties broken by ascending patient index. Scores are clamped to
// [-1, 1].
struct SimilarityRanking {
  std::vector<std::uint32_t> order;
  std::vector<double> scores;  // aligned with `order`
  std::size_t zero_norm_count = 0;

  std::size_t size() const { return order.size(); }
};

// Top-M members of a ranking with per-member weights (nonnegative, at least
// one strictly positive). Patients outside the subpopulation implicitly
// carry weight zero.
struct Subpopulation {
  std::vector<std::uint32_t> member_indices;
  std::vector<double> weights;

  std::size_t size() const { return member_indices.size(); }
};

// (a . b) / (|a| |b|), clamped to [-1, 1]. Throws when either vector has
// zero Euclidean norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// One entry per training patient. Training rows with zero norm are demoted
// to score -1 and counted in zero_norm_count rather than raising; a
// zero-norm index patient throws. `train_norms`, when provided, must hold
// the Euclidean norm of each training row.
SimilarityRanking rank_by_similarity(std::span<const double> index_patient,
                                     MatrixView train,
                                     std::span<const double> train_norms = {});

std::vector<double> compute_row_norms(MatrixView m);

// First M entries of the ranking, weights initialized to 1.
Subpopulation select_top_m(const SimilarityRanking& ranking, std::size_t m);

// Weight w_r at rank position r of a size-M subpopulation under the
// decreasing half of the tricube kernel: (1 - (r/M)^3)^3.
double half_tricube_weight(std::size_t rank_position, std::size_t m);

// uniform: all 1. half_tricube: decreasing in rank position. anti_similar:
// the half-tricube weights reversed, so the least similar member gets the
// largest weight.
Subpopulation apply_weights(const Subpopulation& sub, const SimilarityRanking& ranking,
                            WeightScheme scheme);

}  // namespace ppm
