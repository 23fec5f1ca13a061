#include "ppm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ppm/numeric.hpp"
#include "ppm/rng.hpp"

namespace ppm {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& raw, std::size_t data_row,
                  const std::string& column) {
  const std::string cell = strip(raw);
  if (cell.empty()) {
    throw std::runtime_error("load_csv: empty cell at row " + std::to_string(data_row) +
                             ", column \"" + column + "\"");
  }
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw std::runtime_error("load_csv: non-numeric value \"" + cell + "\" at row " +
                             std::to_string(data_row) + ", column \"" + column + "\"");
  }
  return v;
}

}  // namespace

void Dataset::validate() const {
  if (n_rows == 0 || n_cols == 0)
    throw std::invalid_argument("Dataset: needs at least one row and one feature");
  if (features.size() != n_rows * n_cols)
    throw std::invalid_argument("Dataset: feature buffer size mismatch");
  if (outcomes.size() != n_rows)
    throw std::invalid_argument("Dataset: outcome length does not match row count");
  if (feature_names.size() != n_cols || feature_kinds.size() != n_cols)
    throw std::invalid_argument("Dataset: per-column metadata length mismatch");
  for (int y : outcomes)
    if (y != 0 && y != 1) throw std::invalid_argument("Dataset: outcome not binary");
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (feature_kinds[j] != FeatureKind::binary) continue;
    for (std::size_t i = 0; i < n_rows; ++i) {
      const double v = features[i * n_cols + j];
      if (v != 0.0 && v != 1.0)
        throw std::invalid_argument("Dataset: binary column \"" + feature_names[j] +
                                    "\" holds a value outside {0,1}");
    }
  }
}

Dataset Dataset::subset_rows(std::span<const std::size_t> indices) const {
  Dataset out;
  out.n_rows = indices.size();
  out.n_cols = n_cols;
  out.feature_names = feature_names;
  out.feature_kinds = feature_kinds;
  out.features.resize(out.n_rows * n_cols);
  out.outcomes.resize(out.n_rows);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    std::copy_n(features.data() + src * n_cols, n_cols, out.features.data() + i * n_cols);
    out.outcomes[i] = outcomes[src];
  }
  return out;
}

Dataset load_csv(const std::string& path, const std::string& outcome_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open \"" + path + "\"");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: missing header row");
  const auto header_cells = split_line(line);
  std::vector<std::string> header;
  header.reserve(header_cells.size());
  for (const auto& h : header_cells) header.push_back(strip(h));

  std::ptrdiff_t outcome_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == outcome_column) outcome_idx = static_cast<std::ptrdiff_t>(j);
  if (outcome_idx < 0)
    throw std::runtime_error("load_csv: outcome column \"" + outcome_column +
                             "\" not found");

  Dataset ds;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<std::ptrdiff_t>(j) != outcome_idx) ds.feature_names.push_back(header[j]);
  ds.n_cols = ds.feature_names.size();
  if (ds.n_cols == 0) throw std::runtime_error("load_csv: no feature columns");

  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;  // tolerate a trailing blank line
    ++data_row;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("load_csv: row " + std::to_string(data_row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    std::size_t feat = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double v = parse_cell(cells[j], data_row, header[j]);
      if (static_cast<std::ptrdiff_t>(j) == outcome_idx) {
        if (v != 0.0 && v != 1.0) throw std::runtime_error("load_csv: outcome not binary");
        ds.outcomes.push_back(static_cast<int>(v));
      } else {
        ds.features.push_back(v);
        ++feat;
      }
    }
    (void)feat;
  }
  if (data_row == 0) throw std::runtime_error("load_csv: no data rows");
  ds.n_rows = data_row;

  ds.feature_kinds.assign(ds.n_cols, FeatureKind::binary);
  for (std::size_t j = 0; j < ds.n_cols; ++j) {
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
      const double v = ds.features[i * ds.n_cols + j];
      if (v != 0.0 && v != 1.0) {
        ds.feature_kinds[j] = FeatureKind::continuous;
        break;
      }
    }
  }
  ds.validate();
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path,
               const std::string& outcome_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open \"" + path + "\"");
  for (std::size_t j = 0; j < ds.n_cols; ++j) out << ds.feature_names[j] << ',';
  out << outcome_column << '\n';
  char buf[64];
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    for (std::size_t j = 0; j < ds.n_cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features[i * ds.n_cols + j]);
      out << buf << ',';
    }
    out << ds.outcomes[i] << '\n';
  }
}

StandardizationParams fit_standardizer(const Dataset& train) {
  train.validate();
  StandardizationParams params;
  params.means.assign(train.n_cols, 0.0);
  params.scales.assign(train.n_cols, 1.0);
  const double n = static_cast<double>(train.n_rows);
  for (std::size_t j = 0; j < train.n_cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < train.n_rows; ++i) s += train.features[i * train.n_cols + j];
    params.means[j] = s / n;
  }
  if (train.n_rows >= 2) {
    for (std::size_t j = 0; j < train.n_cols; ++j) {
      double ss = 0.0;
      for (std::size_t i = 0; i < train.n_rows; ++i) {
        const double d = train.features[i * train.n_cols + j] - params.means[j];
        ss += d * d;
      }
      const double sd = std::sqrt(ss / (n - 1.0));
      params.scales[j] = sd > 0.0 ? sd : 1.0;
    }
  }
  return params;
}

Dataset apply_standardizer(const Dataset& ds, const StandardizationParams& params) {
  if (params.means.size() != ds.n_cols || params.scales.size() != ds.n_cols)
    throw std::invalid_argument("apply_standardizer: dimension mismatch");
  Dataset out = ds;
  for (std::size_t j = 0; j < ds.n_cols; ++j) {
    const double m = params.means[j];
    const double s = params.scales[j];
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
      double& v = out.features[i * ds.n_cols + j];
      v = (v - m) / s;
    }
  }
  out.feature_kinds.assign(ds.n_cols, FeatureKind::continuous);
  return out;
}

HoldoutSplit split_holdout(const Dataset& ds, const SplitPlan& plan) {
  ds.validate();
  if (!(plan.holdout_fraction > 0.0 && plan.holdout_fraction < 1.0))
    throw std::invalid_argument("split_holdout: holdout_fraction out of range");
  const std::size_t n = ds.n_rows;
  const std::size_t n_hold = round_half_up(plan.holdout_fraction * static_cast<double>(n));
  if (n_hold < 1 || n - n_hold < 1)
    throw std::invalid_argument("split_holdout: dataset too small for requested fraction");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(plan.seed);
  rng.shuffle(order);

  std::vector<std::size_t> hold(order.begin(), order.begin() + n_hold);
  std::vector<std::size_t> trte(order.begin() + n_hold, order.end());
  std::sort(hold.begin(), hold.end());
  std::sort(trte.begin(), trte.end());

  HoldoutSplit out;
  out.holdout = ds.subset_rows(hold);
  out.trte = ds.subset_rows(trte);
  return out;
}

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, int k,
                                                      std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold_partition: K must be at least 2");
  if (static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("kfold_partition: K exceeds sample size");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + len);
    std::sort(folds[f].begin(), folds[f].end());
    pos += len;
  }
  return folds;
}

}  // namespace ppm
