#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ppm {

inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Probabilities are clipped away from {0,1} before any logit.
constexpr double kProbClip = 1e-6;
// Predicted probabilities stay strictly inside (0,1).
constexpr double kPredClip = 1e-12;

inline double logit(double p) {
  const double q = std::min(1.0 - kProbClip, std::max(kProbClip, p));
  return std::log(q / (1.0 - q));
}

// Overflow-safe inverse logit.
inline double inv_logit(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double log1p_exp(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

inline double norm_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Standard normal quantile: coarse rational start refined by Newton steps on
// the cdf. Accurate to ~1e-14 for u in (1e-300, 1 - 1e-16).
inline double norm_quantile(double u) {
  if (u <= 0.0 || u >= 1.0) {
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("norm_quantile: argument outside [0,1]");
  }
  const bool upper = u > 0.5;
  const double tail = upper ? 1.0 - u : u;
  const double t = std::sqrt(-2.0 * std::log(tail));
  double x = t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t));
  if (!upper) x = -x;
  for (int it = 0; it < 4; ++it) {
    const double err = norm_cdf(x) - u;
    const double dens = norm_pdf(x);
    if (dens <= 0.0) break;
    const double step = err / dens;
    x -= step;
    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// Empirical quantile with linear interpolation of order statistics
// (the "type 7" convention). Input must be sorted ascending.
inline double quantile_type7(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile_type7: empty sample");
  const double qq = std::min(1.0, std::max(0.0, q));
  const double h = static_cast<double>(sorted.size() - 1) * qq;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// ceil(fraction * n) with protection against representation noise such as
// 0.1 * 1600 = 160.00000000000003.
inline std::size_t scaled_ceil(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  const double nearest = std::nearbyint(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

inline std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 when n < 2
};

inline MeanSd sample_mean_sd(std::span<const double> xs) {
  MeanSd out;
  const std::size_t n = xs.size();
  if (n == 0) return out;
  double s = 0.0;
  for (double v : xs) s += v;
  out.mean = s / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : xs) {
    const double d = v - out.mean;
    ss += d * d;
  }
  out.sd = std::sqrt(ss / static_cast<double>(n - 1));
  return out;
}

// In-place Cholesky factorization of a row-major symmetric matrix (lower
// triangle referenced). Returns false when the matrix is not positive
// definite.
inline bool cholesky_factor(std::span<double> a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double dj = std::sqrt(d);
    a[j * n + j] = dj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / dj;
    }
  }
  return true;
}

// Solves L L^T x = b given the factor from cholesky_factor; b is overwritten.
inline void cholesky_solve_inplace(std::span<const double> chol, std::size_t n,
                                   std::span<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol[i * n + k] * b[k];
    b[i] = s / chol[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= chol[k * n + ii] * b[k];
    b[ii] = s / chol[ii * n + ii];
  }
}

// Solves A x = b for symmetric positive definite A, adding a small diagonal
// jitter when the factorization fails. Throws if the system stays singular.
inline std::vector<double> spd_solve(std::vector<double> a, std::size_t n,
                                     std::vector<double> b) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
  std::vector<double> work = a;
  double jitter = 0.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (cholesky_factor(work, n)) {
      cholesky_solve_inplace(work, n, b);
      return b;
    }
    jitter = (jitter == 0.0) ? 1e-10 * std::max(1.0, max_diag) : jitter * 100.0;
    work = a;
    for (std::size_t i = 0; i < n; ++i) work[i * n + i] += jitter;
  }
  throw std::runtime_error("spd_solve: matrix is singular");
}

}  // namespace ppm
