#pragma once

#include <span>
#include <vector>

namespace ppm {

// Piecewise-linear interpolation through fitted anchor points; constant
// beyond the data range.
struct LoessCurve {
  std::vector<double> anchor_x;  // strictly increasing
  std::vector<double> anchor_y;

  double operator()(double x) const;
};

// Degree-1 local regression of y on x with tricube weights over the
// ceil(span_fraction * n) nearest neighbours. For large inputs the fit is
// evaluated at anchors at least `delta` apart and interpolated in between
// (delta < 0 picks an automatic value, 0 fits at every distinct x).
LoessCurve loess_local_linear(std::span<const double> x, std::span<const double> y,
                              double span_fraction, double delta = -1.0);

}  // namespace ppm
