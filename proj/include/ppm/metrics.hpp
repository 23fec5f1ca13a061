#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppm/smoother.hpp"

namespace ppm {

// Paired (observed outcome, predicted probability) collection.
struct PredictionSet {
  std::vector<int> y;     // entries in {0,1}
  std::vector<double> p;  // entries in [0,1]

  std::size_t size() const { return y.size(); }
  void validate() const;
};

struct LossConfig {
  double alpha = 0.5;  // in [0,1]; larger emphasizes calibration
};

enum class SlopeMethod { logistic, linear };

SlopeMethod slope_method_from_string(const std::string& name);
std::string to_string(SlopeMethod method);

struct MetricsConfig {
  double ici_span = 0.75;
  SlopeMethod slope_method = SlopeMethod::logistic;
};

// Per-measure results; a measure is absent when it is undefined for the
// input (single-class outcomes, constant predictions, too few points).
struct PerformanceReport {
  std::optional<double> auroc;
  std::optional<double> auprc;
  std::optional<double> citl;
  std::optional<double> mean_calibration;
  std::optional<double> calibration_slope;
  std::optional<double> ici;
  std::optional<double> brier;
  std::size_t n = 0;
};

// (1/N) sum (y_k - p_k)^2.
double brier_score(const PredictionSet& ps);

struct BrierDecomposition {
  double calibration_term = 0.0;  // (1/N) sum (y_k - p_k)(1 - 2 p_k)
  double refinement_term = 0.0;   // (1/N) sum p_k (1 - p_k)
};

// The two terms sum to the Brier score (within rounding).
BrierDecomposition brier_decomposition(const PredictionSet& ps);

// alpha * calibration_term + (1 - alpha) * refinement_term. At alpha = 0.5
// this equals half the Brier score.
double mixture_loss(const PredictionSet& ps, const LossConfig& cfg);

inline double mixture_loss_from_terms(double calibration_term, double refinement_term,
                                      double alpha) {
  return alpha * calibration_term + (1.0 - alpha) * refinement_term;
}

// Mean absolute difference (1/N) sum |y_k - p_k|; 0 is perfect.
double citl(const PredictionSet& ps);

// |mean(y) - mean(p)|: the difference between the observed event rate and
// the average predicted probability. Unlike citl above this is a pure
// mean-calibration measure, insensitive to sharpness.
double mean_calibration(const PredictionSet& ps);

// Mann-Whitney concordance over (event, non-event) pairs, ties counted 0.5.
// Requires both classes present.
std::optional<double> auroc(const PredictionSet& ps);

// Area under the precision-recall curve by descending-score sweep with
// average-precision summation; tied scores are processed as one block.
// Requires at least one event.
std::optional<double> auprc(const PredictionSet& ps);

// Slope of the logistic recalibration y ~ a + b * logit(p) (ridge 0), with p
// clipped to [1e-6, 1 - 1e-6] before the logit. The linear method instead
// returns the least-squares slope of y on p. Undefined for single-class
// outcomes or constant predictions.
std::optional<double> calibration_slope(const PredictionSet& ps,
                                        SlopeMethod method = SlopeMethod::logistic);

// Smoothed observed frequency as a function of the predicted probability
// (local-linear tricube fit of y on p), clamped to [0,1].
struct CalibrationCurve {
  LoessCurve curve;
  double operator()(double p) const;
};

// Requires at least 10 points and span in (0,1].
CalibrationCurve calibration_curve(const PredictionSet& ps, double span);

// (1/N) sum |curve(p_k) - p_k| evaluated at the observed predictions.
std::optional<double> ici(const PredictionSet& ps, double span = 0.75);

// All measures at once; undefined measures are left absent.
PerformanceReport full_report(const PredictionSet& ps, const MetricsConfig& cfg = {});

// Fixed measure ordering used by reports and result files.
std::vector<std::string> report_measure_names();
std::optional<double> report_measure(const PerformanceReport& report,
                                     const std::string& name);

}  // namespace ppm
