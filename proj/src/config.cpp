#include "ppm/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ppm {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& what) {
  throw std::runtime_error("config: " + path + ": " + what);
}

void require_keys(const json& obj, const std::string& section,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) bad_key(section.empty() ? item.key() : section + "." + item.key(),
                        "unknown key");
  }
}

double get_number(const json& obj, const std::string& section, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) bad_key(section + "." + key, "expected a number");
  return v.get<double>();
}

long long get_integer(const json& obj, const std::string& section, const char* key,
                      long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad_key(section + "." + key, "expected an integer");
  return v.get<long long>();
}

std::uint64_t get_seed(const json& obj, const std::string& section, const char* key,
                       std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad_key(section + "." + key, "expected an integer seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const long long s = v.get<long long>();
  if (s < 0) bad_key(section + "." + key, "seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::string get_string(const json& obj, const std::string& section, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) bad_key(section + "." + key, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& section, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) bad_key(section + "." + key, "expected a boolean");
  return v.get<bool>();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(split.holdout_fraction > 0.0 && split.holdout_fraction < 1.0))
    throw std::runtime_error("config: split.holdout_fraction out of range");
  if (split.k_folds < 2) throw std::runtime_error("config: tuning.K must be at least 2");
  if (split.repeats < 1) throw std::runtime_error("config: tuning.v must be at least 1");
  if (alphas.empty()) throw std::runtime_error("config: tuning.alpha must be nonempty");
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0))
      throw std::runtime_error("config: tuning.alpha outside [0,1]");
  tuning.validate(1);
  validation.validate();
  if (!(metrics.ici_span > 0.0 && metrics.ici_span <= 1.0))
    throw std::runtime_error("config: metrics.ici_span outside (0,1]");
  if (z_repetitions < 1) throw std::runtime_error("config: experiment.Z must be at least 1");
  if (data.simulation) data.simulation->validate();
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  json root = trimmed.empty() ? json::object() : json::parse(trimmed);
  if (!root.is_object()) throw std::runtime_error("config: top level must be an object");
  require_keys(root, "",
               {"data", "simulation", "split", "tuning", "fit", "metrics", "validation",
                "experiment"});

  ExperimentConfig cfg;
  cfg.tuning.m_grid = default_m_grid();

  if (root.contains("data")) {
    const auto& d = root.at("data");
    if (!d.is_object()) bad_key("data", "expected an object");
    require_keys(d, "data", {"path", "outcome"});
    if (d.contains("path")) cfg.data.path = get_string(d, "data", "path", "");
    cfg.data.outcome = get_string(d, "data", "outcome", cfg.data.outcome);
  }

  if (root.contains("simulation")) {
    const auto& s = root.at("simulation");
    if (!s.is_object()) bad_key("simulation", "expected an object");
    require_keys(s, "simulation",
                 {"n", "n_features", "n_binary", "pairwise_correlation", "noise_sd",
                  "seed", "continuous_first"});
    SimulationConfig sim;
    sim.n = get_integer(s, "simulation", "n", sim.n);
    sim.n_features = static_cast<int>(get_integer(s, "simulation", "n_features", sim.n_features));
    sim.n_binary = static_cast<int>(get_integer(s, "simulation", "n_binary", sim.n_binary));
    sim.pairwise_correlation =
        get_number(s, "simulation", "pairwise_correlation", sim.pairwise_correlation);
    sim.noise_sd = get_number(s, "simulation", "noise_sd", sim.noise_sd);
    sim.seed = get_seed(s, "simulation", "seed", sim.seed);
    sim.continuous_first = get_bool(s, "simulation", "continuous_first", sim.continuous_first);
    cfg.data.simulation = sim;
  }

  if (root.contains("split")) {
    const auto& s = root.at("split");
    if (!s.is_object()) bad_key("split", "expected an object");
    require_keys(s, "split", {"holdout_fraction"});
    cfg.split.holdout_fraction =
        get_number(s, "split", "holdout_fraction", cfg.split.holdout_fraction);
  }

  if (root.contains("tuning")) {
    const auto& t = root.at("tuning");
    if (!t.is_object()) bad_key("tuning", "expected an object");
    require_keys(t, "tuning",
                 {"m_grid", "alpha", "K", "v", "seed", "min_subpop",
                  "min_events_per_class", "weight_scheme", "standardize"});
    if (t.contains("m_grid")) {
      const auto& g = t.at("m_grid");
      if (!g.is_array()) bad_key("tuning.m_grid", "expected an array of proportions");
      cfg.tuning.m_grid.clear();
      for (const auto& v : g) {
        if (!v.is_number()) bad_key("tuning.m_grid", "expected numeric entries");
        cfg.tuning.m_grid.push_back(v.get<double>());
      }
    }
    if (t.contains("alpha")) {
      const auto& a = t.at("alpha");
      cfg.alphas.clear();
      if (a.is_number()) {
        cfg.alphas.push_back(a.get<double>());
      } else if (a.is_array()) {
        for (const auto& v : a) {
          if (!v.is_number()) bad_key("tuning.alpha", "expected numeric entries");
          cfg.alphas.push_back(v.get<double>());
        }
      } else {
        bad_key("tuning.alpha", "expected a number or an array of numbers");
      }
    }
    cfg.tuning.k_folds = static_cast<int>(get_integer(t, "tuning", "K", cfg.tuning.k_folds));
    cfg.tuning.repeats = static_cast<int>(get_integer(t, "tuning", "v", cfg.tuning.repeats));
    cfg.tuning.seed = get_seed(t, "tuning", "seed", cfg.tuning.seed);
    cfg.tuning.min_subpop =
        static_cast<int>(get_integer(t, "tuning", "min_subpop", cfg.tuning.min_subpop));
    cfg.tuning.min_events_per_class = static_cast<int>(
        get_integer(t, "tuning", "min_events_per_class", cfg.tuning.min_events_per_class));
    cfg.tuning.weight_scheme = weight_scheme_from_string(
        get_string(t, "tuning", "weight_scheme", to_string(cfg.tuning.weight_scheme)));
    cfg.tuning.standardize = get_bool(t, "tuning", "standardize", cfg.tuning.standardize);
  }

  if (root.contains("fit")) {
    const auto& f = root.at("fit");
    if (!f.is_object()) bad_key("fit", "expected an object");
    require_keys(f, "fit", {"max_iterations", "tolerance", "ridge_penalty"});
    cfg.tuning.fit.max_iterations = static_cast<int>(
        get_integer(f, "fit", "max_iterations", cfg.tuning.fit.max_iterations));
    cfg.tuning.fit.tolerance = get_number(f, "fit", "tolerance", cfg.tuning.fit.tolerance);
    cfg.tuning.fit.ridge_penalty =
        get_number(f, "fit", "ridge_penalty", cfg.tuning.fit.ridge_penalty);
    if (!(cfg.tuning.fit.tolerance > 0.0))
      throw std::runtime_error("config: fit.tolerance must be positive");
    if (cfg.tuning.fit.ridge_penalty < 0.0)
      throw std::runtime_error("config: fit.ridge_penalty must be nonnegative");
    if (cfg.tuning.fit.max_iterations < 1)
      throw std::runtime_error("config: fit.max_iterations must be at least 1");
  }

  if (root.contains("metrics")) {
    const auto& m = root.at("metrics");
    if (!m.is_object()) bad_key("metrics", "expected an object");
    require_keys(m, "metrics", {"ici_span", "slope_method"});
    cfg.metrics.ici_span = get_number(m, "metrics", "ici_span", cfg.metrics.ici_span);
    cfg.metrics.slope_method = slope_method_from_string(
        get_string(m, "metrics", "slope_method", to_string(cfg.metrics.slope_method)));
  }

  if (root.contains("validation")) {
    const auto& v = root.at("validation");
    if (!v.is_object()) bad_key("validation", "expected an object");
    require_keys(v, "validation", {"B", "inner_split", "alpha_level", "seed"});
    cfg.validation.b_replicates =
        get_integer(v, "validation", "B", cfg.validation.b_replicates);
    cfg.validation.inner_split =
        get_number(v, "validation", "inner_split", cfg.validation.inner_split);
    cfg.validation.alpha_level =
        get_number(v, "validation", "alpha_level", cfg.validation.alpha_level);
    cfg.validation.seed = get_seed(v, "validation", "seed", cfg.validation.seed);
  }

  if (root.contains("experiment")) {
    const auto& e = root.at("experiment");
    if (!e.is_object()) bad_key("experiment", "expected an object");
    require_keys(e, "experiment", {"Z", "seed"});
    cfg.z_repetitions = get_integer(e, "experiment", "Z", cfg.z_repetitions);
    cfg.master_seed = get_seed(e, "experiment", "seed", cfg.master_seed);
  }

  // The split plan carries the CV layout so resampling settings live together.
  cfg.split.k_folds = cfg.tuning.k_folds;
  cfg.split.repeats = cfg.tuning.repeats;
  cfg.split.seed = cfg.master_seed;
  // Shared settings propagate to validation.
  cfg.validation.weight_scheme = cfg.tuning.weight_scheme;
  cfg.validation.fit = cfg.tuning.fit;
  cfg.validation.metrics = cfg.metrics;
  cfg.validation.min_events_per_class = cfg.tuning.min_events_per_class;
  cfg.validation.standardize = cfg.tuning.standardize;

  cfg.tuning.alpha = cfg.alphas.front();
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json root;
  if (cfg.data.path) root["data"]["path"] = *cfg.data.path;
  root["data"]["outcome"] = cfg.data.outcome;
  if (cfg.data.simulation) {
    const auto& s = *cfg.data.simulation;
    root["simulation"] = {{"n", s.n},
                          {"n_features", s.n_features},
                          {"n_binary", s.n_binary},
                          {"pairwise_correlation", s.pairwise_correlation},
                          {"noise_sd", s.noise_sd},
                          {"seed", s.seed},
                          {"continuous_first", s.continuous_first}};
  }
  root["split"] = {{"holdout_fraction", cfg.split.holdout_fraction}};
  root["tuning"] = {{"m_grid", cfg.tuning.m_grid},
                    {"alpha", cfg.alphas},
                    {"K", cfg.tuning.k_folds},
                    {"v", cfg.tuning.repeats},
                    {"seed", cfg.tuning.seed},
                    {"min_subpop", cfg.tuning.min_subpop},
                    {"min_events_per_class", cfg.tuning.min_events_per_class},
                    {"weight_scheme", to_string(cfg.tuning.weight_scheme)},
                    {"standardize", cfg.tuning.standardize}};
  root["fit"] = {{"max_iterations", cfg.tuning.fit.max_iterations},
                 {"tolerance", cfg.tuning.fit.tolerance},
                 {"ridge_penalty", cfg.tuning.fit.ridge_penalty}};
  root["metrics"] = {{"ici_span", cfg.metrics.ici_span},
                     {"slope_method", to_string(cfg.metrics.slope_method)}};
  root["validation"] = {{"B", cfg.validation.b_replicates},
                        {"inner_split", cfg.validation.inner_split},
                        {"alpha_level", cfg.validation.alpha_level},
                        {"seed", cfg.validation.seed}};
  root["experiment"] = {{"Z", cfg.z_repetitions}, {"seed", cfg.master_seed}};
  return root.dump(2);
}

}  // namespace ppm
