#pragma once

#include <string>

#include "ppm/metrics.hpp"
#include "ppm/tuner.hpp"
#include "ppm/validator.hpp"

#include "json.hpp"

namespace ppm {

nlohmann::json to_json(const PerformanceReport& report);
nlohmann::json to_json(const TuningResult& result);
nlohmann::json to_json(const ConfidenceInterval& ci);
nlohmann::json to_json(const ValidationReport& report);

// loss_curve.csv: M,proportion,mean_loss,se_loss,feasible
std::string loss_curve_csv(const TuningResult& result);

// replicates.csv: replicate,measure,value (value empty when absent)
std::string replicates_csv(const ValidationReport& report);

// sweep csv: M,proportion,measure,value (one row per measure per grid point)
std::string m_sweep_csv(const std::vector<MSweepPoint>& points);

std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace ppm
