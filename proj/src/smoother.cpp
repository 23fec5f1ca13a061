#include "ppm/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ppm {

double LoessCurve::operator()(double x) const {
  if (anchor_x.empty()) throw std::logic_error("LoessCurve: empty curve");
  if (x <= anchor_x.front()) return anchor_y.front();
  if (x >= anchor_x.back()) return anchor_y.back();
  const auto it = std::upper_bound(anchor_x.begin(), anchor_x.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - anchor_x.begin());
  const std::size_t lo = hi - 1;
  const double width = anchor_x[hi] - anchor_x[lo];
  if (width <= 0.0) return anchor_y[lo];
  const double t = (x - anchor_x[lo]) / width;
  return anchor_y[lo] + t * (anchor_y[hi] - anchor_y[lo]);
}

namespace {

double tricube(double u) {
  const double t = 1.0 - u * u * u;
  return t * t * t;
}

// Weighted degree-1 fit evaluated at x0 over sorted points [lo, hi).
double local_fit(std::span<const double> xs, std::span<const double> ys,
                 std::size_t lo, std::size_t hi, double x0) {
  const double d_lo = x0 - xs[lo];
  const double d_hi = xs[hi - 1] - x0;
  const double d_max = std::max(d_lo, d_hi);

  double sw = 0.0, swu = 0.0, swy = 0.0, swuu = 0.0, swuy = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double u = xs[i] - x0;
    const double w = d_max > 0.0 ? tricube(std::abs(u) / d_max) : 1.0;
    sw += w;
    swu += w * u;
    swy += w * ys[i];
    swuu += w * u * u;
    swuy += w * u * ys[i];
  }
  const double denom = sw * swuu - swu * swu;
  if (denom <= 0.0 || sw <= 0.0) return sw > 0.0 ? swy / sw : 0.0;
  // intercept of y ~ a + b*(x - x0), i.e. the fitted value at x0
  return (swy * swuu - swu * swuy) / denom;
}

}  // namespace

LoessCurve loess_local_linear(std::span<const double> x, std::span<const double> y,
                              double span_fraction, double delta) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("loess: length mismatch");
  if (n < 2) throw std::invalid_argument("loess: too few points");
  if (!(span_fraction > 0.0 && span_fraction <= 1.0))
    throw std::invalid_argument("loess: span must lie in (0,1]");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const std::size_t q =
      std::min(n, std::max<std::size_t>(2, static_cast<std::size_t>(
                                               std::ceil(span_fraction * double(n)))));
  if (delta < 0.0) delta = n > 2000 ? (xs.back() - xs.front()) / 500.0 : 0.0;

  LoessCurve curve;
  std::size_t lo = 0;
  std::size_t i = 0;
  while (i < n) {
    const double x0 = xs[i];
    // slide the window of q nearest neighbours along with x0
    while (lo + q < n && xs[lo + q] - x0 < x0 - xs[lo]) ++lo;
    curve.anchor_x.push_back(x0);
    curve.anchor_y.push_back(local_fit(xs, ys, lo, lo + q, x0));

    // skip points closer than delta to this anchor, but always fit the last
    std::size_t next = i + 1;
    while (next < n - 1 && xs[next] <= x0 + delta) ++next;
    i = next;
  }
  // collapse duplicate anchor x values (ties in the data)
  std::vector<double> ax, ay;
  for (std::size_t k = 0; k < curve.anchor_x.size(); ++k) {
    if (!ax.empty() && curve.anchor_x[k] == ax.back()) continue;
    ax.push_back(curve.anchor_x[k]);
    ay.push_back(curve.anchor_y[k]);
  }
  curve.anchor_x = std::move(ax);
  curve.anchor_y = std::move(ay);
  return curve;
}

}  // namespace ppm
