#include "ppm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ppm/glm.hpp"
#include "ppm/numeric.hpp"

namespace ppm {

void PredictionSet::validate() const {
  if (y.empty() || y.size() != p.size())
    throw std::invalid_argument("PredictionSet: empty or mismatched pairs");
  for (int v : y)
    if (v != 0 && v != 1) throw std::invalid_argument("PredictionSet: outcome not binary");
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("PredictionSet: probability outside [0,1]");
}

SlopeMethod slope_method_from_string(const std::string& name) {
  if (name == "logistic") return SlopeMethod::logistic;
  if (name == "linear") return SlopeMethod::linear;
  throw std::invalid_argument("unknown slope_method \"" + name + "\"");
}

std::string to_string(SlopeMethod method) {
  return method == SlopeMethod::logistic ? "logistic" : "linear";
}

double brier_score(const PredictionSet& ps) {
  ps.validate();
  double s = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const double d = ps.y[k] - ps.p[k];
    s += d * d;
  }
  return s / static_cast<double>(ps.size());
}

BrierDecomposition brier_decomposition(const PredictionSet& ps) {
  ps.validate();
  BrierDecomposition out;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const double pk = ps.p[k];
    out.calibration_term += (ps.y[k] - pk) * (1.0 - 2.0 * pk);
    out.refinement_term += pk * (1.0 - pk);
  }
  const double n = static_cast<double>(ps.size());
  out.calibration_term /= n;
  out.refinement_term /= n;
  return out;
}

double mixture_loss(const PredictionSet& ps, const LossConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    throw std::invalid_argument("mixture_loss: alpha outside [0,1]");
  const auto terms = brier_decomposition(ps);
  return mixture_loss_from_terms(terms.calibration_term, terms.refinement_term, cfg.alpha);
}

double citl(const PredictionSet& ps) {
  ps.validate();
  double s = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) s += std::abs(ps.y[k] - ps.p[k]);
  return s / static_cast<double>(ps.size());
}

double mean_calibration(const PredictionSet& ps) {
  ps.validate();
  double s = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) s += ps.y[k] - ps.p[k];
  return std::abs(s) / static_cast<double>(ps.size());
}

std::optional<double> auroc(const PredictionSet& ps) {
  ps.validate();
  const std::size_t n = ps.size();
  std::size_t n_pos = 0;
  for (int v : ps.y) n_pos += static_cast<std::size_t>(v);
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  // Midrank formulation of the Mann-Whitney statistic: ties contribute 0.5.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ps.p[a] < ps.p[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && ps.p[order[j]] == ps.p[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k)
      if (ps.y[order[k]] == 1) rank_sum_pos += midrank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::optional<double> auprc(const PredictionSet& ps) {
  ps.validate();
  const std::size_t n = ps.size();
  std::size_t n_pos = 0;
  for (int v : ps.y) n_pos += static_cast<std::size_t>(v);
  if (n_pos == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ps.p[a] > ps.p[b]; });

  double ap = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    std::size_t block_tp = 0;
    while (j < n && ps.p[order[j]] == ps.p[order[i]]) {
      block_tp += static_cast<std::size_t>(ps.y[order[j]]);
      ++j;
    }
    tp += block_tp;
    fp += (j - i) - block_tp;
    if (block_tp > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      ap += static_cast<double>(block_tp) * precision;
    }
    i = j;
  }
  return ap / static_cast<double>(n_pos);
}

std::optional<double> calibration_slope(const PredictionSet& ps, SlopeMethod method) {
  ps.validate();
  bool has_pos = false, has_neg = false;
  for (int v : ps.y) (v == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) return std::nullopt;

  const std::size_t n = ps.size();
  if (method == SlopeMethod::linear) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sx += ps.p[k];
      sy += ps.y[k];
      sxx += ps.p[k] * ps.p[k];
      sxy += ps.p[k] * ps.y[k];
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom <= 0.0) return std::nullopt;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
  }

  std::vector<double> logits(n);
  for (std::size_t k = 0; k < n; ++k) logits[k] = logit(ps.p[k]);
  const double first = logits[0];
  bool all_equal = true;
  for (double v : logits)
    if (v != first) {
      all_equal = false;
      break;
    }
  if (all_equal) return std::nullopt;

  FitConfig cfg;
  cfg.ridge_penalty = 0.0;
  MatrixView x{logits.data(), n, 1};
  std::vector<double> w(n, 1.0);
  const auto fit = fit_weighted_logistic(x, ps.y, w, cfg);
  return fit.coefficients.betas[0];
}

double CalibrationCurve::operator()(double p) const { return clamp01(curve(p)); }

CalibrationCurve calibration_curve(const PredictionSet& ps, double span) {
  ps.validate();
  if (ps.size() < 10) throw std::invalid_argument("calibration_curve: too few points");
  if (!(span > 0.0 && span <= 1.0))
    throw std::invalid_argument("calibration_curve: span must lie in (0,1]");
  std::vector<double> yd(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) yd[k] = static_cast<double>(ps.y[k]);
  return CalibrationCurve{loess_local_linear(ps.p, yd, span)};
}

std::optional<double> ici(const PredictionSet& ps, double span) {
  if (ps.size() < 10) return std::nullopt;
  const auto curve = calibration_curve(ps, span);
  double s = 0.0;
  for (double pk : ps.p) s += std::abs(curve(pk) - pk);
  return s / static_cast<double>(ps.size());
}

PerformanceReport full_report(const PredictionSet& ps, const MetricsConfig& cfg) {
  ps.validate();
  PerformanceReport report;
  report.n = ps.size();
  report.brier = brier_score(ps);
  report.citl = citl(ps);
  report.mean_calibration = mean_calibration(ps);
  report.auroc = auroc(ps);
  report.auprc = auprc(ps);
  report.calibration_slope = calibration_slope(ps, cfg.slope_method);
  report.ici = ici(ps, cfg.ici_span);
  return report;
}

std::vector<std::string> report_measure_names() {
  return {"auroc", "auprc", "citl", "mean_calibration", "calibration_slope", "ici",
          "brier"};
}

std::optional<double> report_measure(const PerformanceReport& report,
                                     const std::string& name) {
  if (name == "auroc") return report.auroc;
  if (name == "auprc") return report.auprc;
  if (name == "citl") return report.citl;
  if (name == "mean_calibration") return report.mean_calibration;
  if (name == "calibration_slope") return report.calibration_slope;
  if (name == "ici") return report.ici;
  if (name == "brier") return report.brier;
  throw std::invalid_argument("unknown measure \"" + name + "\"");
}

}  // namespace ppm
