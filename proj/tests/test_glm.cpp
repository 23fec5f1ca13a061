#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <vector>

#include "ppm/glm.hpp"
#include "ppm/numeric.hpp"
#include "ppm/rng.hpp"

using namespace ppm;

namespace {

struct Problem {
  std::vector<double> x;
  std::vector<int> y;
  std::vector<double> w;
  std::size_t n = 0;
  std::size_t p = 0;
  MatrixView view() const { return {x.data(), n, p}; }
};

Problem random_problem(std::size_t n, std::size_t p, std::uint64_t seed) {
  Problem pr;
  pr.n = n;
  pr.p = p;
  pr.x.resize(n * p);
  pr.y.resize(n);
  pr.w.assign(n, 1.0);
  Rng rng(seed);
  for (auto& v : pr.x) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double eta = -0.3;
    for (std::size_t j = 0; j < p; ++j)
      eta += (j % 2 == 0 ? 0.8 : -0.6) * pr.x[i * p + j];
    pr.y[i] = rng.uniform01() < inv_logit(eta) ? 1 : 0;
  }
  return pr;
}

double max_coef_diff(const ModelCoefficients& a, const ModelCoefficients& b) {
  double d = std::abs(a.intercept - b.intercept);
  for (std::size_t j = 0; j < a.betas.size(); ++j)
    d = std::max(d, std::abs(a.betas[j] - b.betas[j]));
  return d;
}

}  // namespace

TEST_SUITE("glm") {

TEST_CASE("weight scaling leaves the unpenalized fit unchanged") {
  auto pr = random_problem(300, 3, 1);
  FitConfig cfg;
  cfg.ridge_penalty = 0.0;
  const auto base = fit_weighted_logistic(pr.view(), pr.y, pr.w, cfg);
  std::vector<double> doubled(pr.n, 2.0);
  const auto scaled = fit_weighted_logistic(pr.view(), pr.y, doubled, cfg);
  CHECK(max_coef_diff(base.coefficients, scaled.coefficients) < 1e-8);
}

TEST_CASE("duplicating a row equals doubling its weight") {
  auto pr = random_problem(120, 2, 2);
  FitConfig cfg;
  cfg.ridge_penalty = 0.0;

  Problem dup = pr;
  dup.n = pr.n + 1;
  for (std::size_t j = 0; j < pr.p; ++j) dup.x.push_back(pr.x[j]);  // copy row 0
  dup.y.push_back(pr.y[0]);
  dup.w.push_back(1.0);

  auto weighted = pr;
  weighted.w[0] = 2.0;

  const auto a = fit_weighted_logistic(dup.view(), dup.y, dup.w, cfg);
  const auto b = fit_weighted_logistic(weighted.view(), weighted.y, weighted.w, cfg);
  CHECK(max_coef_diff(a.coefficients, b.coefficients) < 1e-8);
}

TEST_CASE("intercept-only fit recovers the log odds of the mean") {
  std::vector<int> y{1, 1, 1, 0, 0, 1, 0, 1, 1, 0};
  const std::size_t n = y.size();
  std::vector<double> w(n, 1.0);
  FitConfig cfg;
  cfg.ridge_penalty = 0.0;
  MatrixView x{nullptr, n, 0};
  const auto fit = fit_weighted_logistic(x, y, w, cfg);
  const double ybar = 0.6;
  CHECK(fit.coefficients.intercept ==
        doctest::Approx(std::log(ybar / (1.0 - ybar))).epsilon(1e-8));
  CHECK(fit.coefficients.betas.empty());
  CHECK(fit.diagnostics.converged);
}

TEST_CASE("zero-weight rows are irrelevant") {
  auto pr = random_problem(200, 3, 3);
  const auto base = fit_weighted_logistic(pr.view(), pr.y, pr.w, FitConfig{});

  // append junk rows carrying weight zero
  Problem padded = pr;
  Rng rng(77);
  for (int extra = 0; extra < 50; ++extra) {
    for (std::size_t j = 0; j < pr.p; ++j) padded.x.push_back(10.0 * rng.normal());
    padded.y.push_back(extra % 2);
    padded.w.push_back(0.0);
    ++padded.n;
  }
  const auto same = fit_weighted_logistic(padded.view(), padded.y, padded.w, FitConfig{});
  CHECK(max_coef_diff(base.coefficients, same.coefficients) < 1e-10);
}

TEST_CASE("ridge keeps separable data finite") {
  // perfectly separable in one dimension
  Problem pr;
  pr.n = 40;
  pr.p = 1;
  pr.x.resize(pr.n);
  pr.y.resize(pr.n);
  pr.w.assign(pr.n, 1.0);
  for (std::size_t i = 0; i < pr.n; ++i) {
    pr.x[i] = i < 20 ? -1.0 - 0.01 * double(i) : 1.0 + 0.01 * double(i);
    pr.y[i] = i < 20 ? 0 : 1;
  }
  FitConfig cfg;
  cfg.ridge_penalty = 1e-6;
  cfg.max_iterations = 200;
  const auto fit = fit_weighted_logistic(pr.view(), pr.y, pr.w, cfg);
  CHECK(std::isfinite(fit.coefficients.intercept));
  CHECK(std::isfinite(fit.coefficients.betas[0]));
  CHECK(fit.diagnostics.iterations <= 200);
}

TEST_CASE("degenerate inputs are rejected") {
  Problem pr = random_problem(30, 2, 4);
  std::fill(pr.y.begin(), pr.y.end(), 1);
  CHECK_THROWS_WITH_AS(fit_weighted_logistic(pr.view(), pr.y, pr.w, FitConfig{}),
                       doctest::Contains("degenerate outcome"), std::runtime_error);

  Problem pr2 = random_problem(30, 2, 5);
  std::fill(pr2.w.begin(), pr2.w.end(), 0.0);
  CHECK_THROWS(fit_weighted_logistic(pr2.view(), pr2.y, pr2.w, FitConfig{}));

  // single-class among positive weights, even though both classes exist
  Problem pr3 = random_problem(30, 2, 6);
  for (std::size_t i = 0; i < pr3.n; ++i)
    if (pr3.y[i] == 0) pr3.w[i] = 0.0;
  CHECK_THROWS(fit_weighted_logistic(pr3.view(), pr3.y, pr3.w, FitConfig{}));
}

TEST_CASE("score vanishes at the optimum and matches finite differences") {
  auto pr = random_problem(250, 4, 7);
  for (std::size_t i = 0; i < pr.n; ++i) pr.w[i] = 0.25 + 1.5 * (i % 4);
  FitConfig cfg;  // default ridge 1e-6
  const auto fit = fit_weighted_logistic(pr.view(), pr.y, pr.w, cfg);

  const auto score =
      weighted_penalized_score(pr.view(), pr.y, pr.w, fit.coefficients, cfg.ridge_penalty);
  for (double g : score) CHECK(std::abs(g) <= 1e-6);

  // central finite differences of the penalized log-likelihood
  const double h = 1e-6;
  ModelCoefficients probe = fit.coefficients;
  auto ll_at = [&](const ModelCoefficients& c) {
    return weighted_penalized_loglik(pr.view(), pr.y, pr.w, c, cfg.ridge_penalty);
  };
  ModelCoefficients shifted = probe;
  // evaluate away from the optimum so the gradient is nonzero
  shifted.intercept += 0.3;
  for (auto& b : shifted.betas) b += 0.2;
  const auto analytic =
      weighted_penalized_score(pr.view(), pr.y, pr.w, shifted, cfg.ridge_penalty);
  for (std::size_t j = 0; j <= pr.p; ++j) {
    ModelCoefficients up = shifted, down = shifted;
    if (j == 0) {
      up.intercept += h;
      down.intercept -= h;
    } else {
      up.betas[j - 1] += h;
      down.betas[j - 1] -= h;
    }
    const double fd = (ll_at(up) - ll_at(down)) / (2.0 * h);
    CHECK(std::abs(fd - analytic[j]) <= 1e-4 * std::max(1.0, std::abs(analytic[j])));
  }
}

TEST_CASE("large-sample fit recovers the generating coefficients") {
  const std::size_t n = 50000;
  const std::size_t p = 3;
  const std::vector<double> truth{0.4, -0.7, 0.2};
  const double true_intercept = -0.3;

  Problem pr;
  pr.n = n;
  pr.p = p;
  pr.x.resize(n * p);
  pr.y.resize(n);
  pr.w.assign(n, 1.0);
  Rng rng(1234);
  for (auto& v : pr.x) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double eta = true_intercept;
    for (std::size_t j = 0; j < p; ++j) eta += truth[j] * pr.x[i * p + j];
    pr.y[i] = rng.uniform01() < inv_logit(eta) ? 1 : 0;
  }
  FitConfig cfg;
  cfg.ridge_penalty = 0.0;
  const auto fit = fit_weighted_logistic(pr.view(), pr.y, pr.w, cfg);

  // standard errors from the inverse observed information
  const std::size_t d = p + 1;
  std::vector<double> info(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = fit.coefficients.intercept;
    for (std::size_t j = 0; j < p; ++j) eta += fit.coefficients.betas[j] * pr.x[i * p + j];
    const double mu = inv_logit(eta);
    const double r = mu * (1.0 - mu);
    std::vector<double> xt(d);
    xt[0] = 1.0;
    for (std::size_t j = 0; j < p; ++j) xt[j + 1] = pr.x[i * p + j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) info[a * d + b] += r * xt[a] * xt[b];
  }
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    const auto col = spd_solve(info, d, e);
    const double se = std::sqrt(col[j]);
    const double target = j == 0 ? true_intercept : truth[j - 1];
    const double est = j == 0 ? fit.coefficients.intercept : fit.coefficients.betas[j - 1];
    CHECK(std::abs(est - target) <= 3.0 * se);
  }
}

TEST_CASE("predict_prob saturation and known value") {
  ModelCoefficients zero;
  zero.betas = {0.0};
  CHECK(predict_prob(zero, std::vector<double>{1.0}) == 0.5);

  ModelCoefficients big;
  big.intercept = 40.0;
  big.betas = {};
  CHECK(predict_prob(big, std::vector<double>{}) == 1.0 - 1e-12);
  big.intercept = -40.0;
  CHECK(predict_prob(big, std::vector<double>{}) == 1e-12);

  ModelCoefficients unit;
  unit.intercept = 0.0;
  unit.betas = {1.0};
  CHECK(predict_prob(unit, std::vector<double>{0.5}) ==
        doctest::Approx(0.6224593312018546).epsilon(1e-12));

  CHECK_THROWS(predict_prob(unit, std::vector<double>{1.0, 2.0}));
}

}  // TEST_SUITE
