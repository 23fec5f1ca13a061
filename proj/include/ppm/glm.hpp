#pragma once

#include <span>
#include <vector>

#include "ppm/matrix.hpp"

namespace ppm {

struct ModelCoefficients {
  double intercept = 0.0;
  std::vector<double> betas;
};

struct FitConfig {
  int max_iterations = 50;
  double tolerance = 1e-8;      // maximum absolute coefficient change
  double ridge_penalty = 1e-6;  // applied to non-intercept coefficients
};

struct FitDiagnostics {
  bool converged = false;
  int iterations = 0;
  double final_change = 0.0;
};

struct FitResult {
  ModelCoefficients coefficients;
  FitDiagnostics diagnostics;
};

// Weighted logistic regression via iteratively reweighted least squares
// (Newton-Raphson with step-halving). Maximizes the w-weighted Bernoulli
// log-likelihood minus (ridge_penalty/2)*|betas|^2. Deterministic; rows with
// weight zero do not influence the fit. Throws on dimension mismatch, on a
// nonpositive total weight, and on a single-class outcome among
// positive-weight rows ("degenerate outcome"). Non-convergence is reported
// through the diagnostics, not an exception.
FitResult fit_weighted_logistic(MatrixView x, std::span<const int> y,
                                std::span<const double> w, const FitConfig& cfg = {});

// Inverse-logit of intercept + betas . x, clipped to [1e-12, 1 - 1e-12].
double predict_prob(const ModelCoefficients& coefs, std::span<const double> x);

// Penalized weighted log-likelihood and its gradient (intercept first, then
// betas); exposed for verification.
double weighted_penalized_loglik(MatrixView x, std::span<const int> y,
                                 std::span<const double> w,
                                 const ModelCoefficients& coefs, double ridge_penalty);

std::vector<double> weighted_penalized_score(MatrixView x, std::span<const int> y,
                                             std::span<const double> w,
                                             const ModelCoefficients& coefs,
                                             double ridge_penalty);

}  // namespace ppm
