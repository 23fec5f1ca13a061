#include "ppm/reports.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ppm {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

json optional_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

json to_json(const PerformanceReport& report) {
  json out;
  out["n"] = report.n;
  for (const auto& name : report_measure_names())
    out[name] = optional_to_json(report_measure(report, name));
  return out;
}

json to_json(const TuningResult& result) {
  json curve = json::array();
  for (const auto& pt : result.loss_curve) {
    json row;
    row["M"] = pt.m;
    row["proportion"] = pt.proportion;
    row["feasible"] = pt.feasible;
    row["mean_loss"] = pt.feasible ? json(pt.mean_loss) : json(nullptr);
    row["se_loss"] = pt.feasible ? json(pt.se_loss) : json(nullptr);
    row["n_evaluations"] = pt.n_evaluations;
    curve.push_back(row);
  }
  json out;
  out["alpha"] = result.alpha;
  out["loss_curve"] = curve;
  out["optimal_m"] = result.optimal_m;
  out["p_optimal"] = result.p_optimal;
  out["n_train_ref"] = result.n_train_ref;
  out["skipped"] = result.skipped;
  out["nonconverged"] = result.nonconverged;
  return out;
}

json to_json(const ConfidenceInterval& ci) {
  json out;
  out["point"] = ci.point;
  out["se"] = ci.se;
  out["lower"] = ci.lower;
  out["upper"] = ci.upper;
  out["method"] = to_string(ci.method);
  return out;
}

json to_json(const ValidationReport& report) {
  json measures;
  for (const auto& mv : report.measures) {
    json entry;
    if (mv.interval) {
      entry = to_json(*mv.interval);
    } else {
      entry["point"] = nullptr;
      entry["se"] = nullptr;
      entry["lower"] = nullptr;
      entry["upper"] = nullptr;
      entry["method"] = nullptr;
    }
    entry["reference"] = optional_to_json(mv.reference);
    entry["n_values"] = mv.n_values;
    entry["n_failed_replicates"] = mv.n_missing;
    measures[mv.measure] = entry;
  }
  json out;
  out["B"] = report.b_replicates;
  out["p_optimal"] = report.p_optimal;
  out["n_failed_replicates"] = report.n_failed_replicates;
  out["measures"] = measures;
  return out;
}

std::string loss_curve_csv(const TuningResult& result) {
  std::ostringstream out;
  out << "M,proportion,mean_loss,se_loss,feasible\n";
  for (const auto& pt : result.loss_curve) {
    out << pt.m << ',' << format_double(pt.proportion) << ',';
    if (pt.feasible) out << format_double(pt.mean_loss) << ',' << format_double(pt.se_loss);
    else out << ',';
    out << ',' << (pt.feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string replicates_csv(const ValidationReport& report) {
  std::ostringstream out;
  out << "replicate,measure,value\n";
  const auto names = report_measure_names();
  for (std::size_t mi = 0; mi < names.size(); ++mi) {
    const auto& column = report.replicate_values[mi];
    for (std::size_t b = 0; b < column.size(); ++b) {
      out << b << ',' << names[mi] << ',';
      if (column[b]) out << format_double(*column[b]);
      out << '\n';
    }
  }
  return out.str();
}

std::string m_sweep_csv(const std::vector<MSweepPoint>& points) {
  std::ostringstream out;
  out << "M,proportion,measure,value\n";
  const auto names = report_measure_names();
  for (const auto& pt : points) {
    if (!pt.feasible) continue;
    for (const auto& name : names) {
      const auto v = report_measure(pt.report, name);
      out << pt.m << ',' << format_double(pt.proportion) << ',' << name << ',';
      if (v) out << format_double(*v);
      out << '\n';
    }
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write \"" + path + "\"");
  out << text;
}

}  // namespace ppm
