#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppm/matrix.hpp"

namespace ppm {

enum class FeatureKind { binary, continuous };

// Feature matrix with a binary outcome per row. Immutable after construction
// by convention; operations below return fresh datasets, so instances can be
// shared freely across threads.
struct Dataset {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> features;  // row-major, n_rows * n_cols
  std::vector<int> outcomes;     // entries in {0,1}
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> feature_kinds;

  MatrixView view() const { return {features.data(), n_rows, n_cols}; }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_cols, n_cols};
  }

  // Throws std::invalid_argument when any structural invariant is violated
  // (empty data, outcome/feature length mismatch, non-binary outcome, a
  // binary-kind column holding values outside {0,1}).
  void validate() const;

  Dataset subset_rows(std::span<const std::size_t> indices) const;
};

struct StandardizationParams {
  std::vector<double> means;
  std::vector<double> scales;  // strictly positive
};

struct SplitPlan {
  double holdout_fraction = 0.2;
  int k_folds = 10;
  int repeats = 20;
  std::uint64_t seed = 12345;
};

struct HoldoutSplit {
  Dataset trte;
  Dataset holdout;
};

// Reads a comma-separated file with a mandatory header row. Every column
// other than `outcome_column` becomes a feature; a column is binary iff all
// of its values are 0 or 1. Row order is preserved.
Dataset load_csv(const std::string& path, const std::string& outcome_column);

void write_csv(const Dataset& ds, const std::string& path,
               const std::string& outcome_column = "y");

// Column means and sample standard deviations of the training data; zero
// standard deviations are replaced by 1 so constant columns stay usable.
StandardizationParams fit_standardizer(const Dataset& train);

// (x - mean) / scale per column; outcomes untouched. The result is marked
// all-continuous since binary columns no longer hold {0,1} values.
Dataset apply_standardizer(const Dataset& ds, const StandardizationParams& params);

// Disjoint row partition with |holdout| = round(fraction * N), rounding half
// up. Deterministic given the plan seed.
HoldoutSplit split_holdout(const Dataset& ds, const SplitPlan& plan);

// K disjoint folds covering {0,...,n-1}, sizes differing by at most one,
// deterministic given the seed. Each fold is sorted ascending.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, int k,
                                                      std::uint64_t seed);

}  // namespace ppm
