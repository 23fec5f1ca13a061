#include "ppm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppm/numeric.hpp"

namespace ppm {

namespace {

void check_inputs(MatrixView x, std::span<const int> y, std::span<const double> w) {
  if (y.size() != x.rows || w.size() != x.rows)
    throw std::invalid_argument("fit_weighted_logistic: dimension mismatch");
  double total = 0.0;
  bool has_event = false;
  bool has_nonevent = false;
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (w[i] < 0.0) throw std::invalid_argument("fit_weighted_logistic: negative weight");
    if (w[i] > 0.0) {
      total += w[i];
      if (y[i] == 1)
        has_event = true;
      else
        has_nonevent = true;
    }
  }
  if (total <= 0.0)
    throw std::invalid_argument("fit_weighted_logistic: total weight is zero");
  if (!has_event || !has_nonevent)
    throw std::runtime_error("fit_weighted_logistic: degenerate outcome");
}

double loglik_at(MatrixView x, std::span<const int> y, std::span<const double> w,
                 std::span<const double> beta, double ridge) {
  const std::size_t p = x.cols;
  double ll = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (w[i] == 0.0) continue;
    const double* xi = x.data + i * p;
    double eta = beta[0];
    for (std::size_t j = 0; j < p; ++j) eta += beta[j + 1] * xi[j];
    ll += w[i] * (y[i] * eta - log1p_exp(eta));
  }
  for (std::size_t j = 1; j <= p; ++j) ll -= 0.5 * ridge * beta[j] * beta[j];
  return ll;
}

}  // namespace

FitResult fit_weighted_logistic(MatrixView x, std::span<const int> y,
                                std::span<const double> w, const FitConfig& cfg) {
  check_inputs(x, y, w);
  const std::size_t p = x.cols;
  const std::size_t d = p + 1;  // intercept first

  // Start from the intercept-only weighted mean; a good deterministic origin.
  double sw = 0.0;
  double swy = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  std::vector<double> beta(d, 0.0);
  beta[0] = logit(swy / sw);

  std::vector<double> grad(d), hess(d * d), step(d), candidate(d);
  double ll = loglik_at(x, y, w, beta, cfg.ridge_penalty);

  FitResult out;
  out.diagnostics.final_change = 0.0;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);

    for (std::size_t i = 0; i < x.rows; ++i) {
      const double wi = w[i];
      if (wi == 0.0) continue;
      const double* xi = x.data + i * p;
      double eta = beta[0];
      for (std::size_t j = 0; j < p; ++j) eta += beta[j + 1] * xi[j];
      const double mu = inv_logit(eta);
      const double resid = wi * (y[i] - mu);
      const double curv = std::max(wi * mu * (1.0 - mu), 1e-12 * wi);

      grad[0] += resid;
      hess[0] += curv;
      for (std::size_t a = 0; a < p; ++a) {
        grad[a + 1] += resid * xi[a];
        const double ca = curv * xi[a];
        double* hrow = hess.data() + (a + 1) * d;
        hrow[0] += ca;
        for (std::size_t b = 0; b <= a; ++b) hrow[b + 1] += ca * xi[b];
      }
    }
    for (std::size_t j = 1; j < d; ++j) {
      grad[j] -= cfg.ridge_penalty * beta[j];
      hess[j * d + j] += cfg.ridge_penalty;
    }

    step = grad;
    std::vector<double> factor = hess;
    if (!cholesky_factor(factor, d)) {
      // near-singular curvature: jitter the diagonal and retry once
      factor = hess;
      double max_diag = 0.0;
      for (std::size_t j = 0; j < d; ++j) max_diag = std::max(max_diag, factor[j * d + j]);
      for (std::size_t j = 0; j < d; ++j) factor[j * d + j] += 1e-10 * std::max(1.0, max_diag);
      if (!cholesky_factor(factor, d)) break;
    }
    cholesky_solve_inplace(factor, d, step);

    // Step-halving keeps the penalized likelihood nondecreasing.
    double scale = 1.0;
    double new_ll = ll;
    bool improved = false;
    for (int half = 0; half < 30; ++half) {
      for (std::size_t j = 0; j < d; ++j) candidate[j] = beta[j] + scale * step[j];
      new_ll = loglik_at(x, y, w, candidate, cfg.ridge_penalty);
      if (new_ll >= ll - 1e-12) {
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    out.diagnostics.iterations = iter;
    if (!improved) break;

    double change = 0.0;
    for (std::size_t j = 0; j < d; ++j) change = std::max(change, std::abs(scale * step[j]));
    beta = candidate;
    ll = new_ll;
    out.diagnostics.final_change = change;
    if (change <= cfg.tolerance) {
      out.diagnostics.converged = true;
      break;
    }
  }

  out.coefficients.intercept = beta[0];
  out.coefficients.betas.assign(beta.begin() + 1, beta.end());
  return out;
}

double predict_prob(const ModelCoefficients& coefs, std::span<const double> x) {
  if (x.size() != coefs.betas.size())
    throw std::invalid_argument("predict_prob: dimension mismatch");
  double eta = coefs.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) eta += coefs.betas[j] * x[j];
  const double p = inv_logit(eta);
  return std::min(1.0 - kPredClip, std::max(kPredClip, p));
}

double weighted_penalized_loglik(MatrixView x, std::span<const int> y,
                                 std::span<const double> w,
                                 const ModelCoefficients& coefs, double ridge_penalty) {
  std::vector<double> beta(x.cols + 1);
  beta[0] = coefs.intercept;
  std::copy(coefs.betas.begin(), coefs.betas.end(), beta.begin() + 1);
  return loglik_at(x, y, w, beta, ridge_penalty);
}

std::vector<double> weighted_penalized_score(MatrixView x, std::span<const int> y,
                                             std::span<const double> w,
                                             const ModelCoefficients& coefs,
                                             double ridge_penalty) {
  const std::size_t p = x.cols;
  std::vector<double> grad(p + 1, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (w[i] == 0.0) continue;
    const double* xi = x.data + i * p;
    double eta = coefs.intercept;
    for (std::size_t j = 0; j < p; ++j) eta += coefs.betas[j] * xi[j];
    const double resid = w[i] * (y[i] - inv_logit(eta));
    grad[0] += resid;
    for (std::size_t j = 0; j < p; ++j) grad[j + 1] += resid * xi[j];
  }
  for (std::size_t j = 0; j < p; ++j) grad[j + 1] -= ridge_penalty * coefs.betas[j];
  return grad;
}

}  // namespace ppm
