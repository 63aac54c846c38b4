#include "ccdfx/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace ccdfx::cli {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::analytic: return "analytic";
    case EstimatorKind::mc: return "mc";
    case EstimatorKind::subset: return "subset";
  }
  return "unknown";
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

EstimatorKind parse_estimator_kind(std::string_view text) {
  if (text == "analytic") return EstimatorKind::analytic;
  if (text == "mc") return EstimatorKind::mc;
  if (text == "subset") return EstimatorKind::subset;
  throw ConfigError("unknown estimator '" + std::string(text) + "' (analytic|mc|subset)");
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ConfigError("unknown format '" + std::string(text) + "' (csv|json)");
}

double EpsilonRule::resolve(const PosteriorSummary& summary) const {
  switch (kind) {
    case Kind::three_sigma: return 3.0 * summary.sigma_p;
    case Kind::sqrt_de: return std::sqrt(summary.d_e);
    case Kind::explicit_value: return value;
  }
  return value;
}

std::string EpsilonRule::label() const {
  switch (kind) {
    case Kind::three_sigma: return "three-sigma";
    case Kind::sqrt_de: return "sqrt-de";
    case Kind::explicit_value: return json(value).dump();
  }
  return "";
}

EpsilonRule EpsilonRule::parse(std::string_view text) {
  if (text == "three-sigma") return {Kind::three_sigma, 0.0};
  if (text == "sqrt-de") return {Kind::sqrt_de, 0.0};
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("epsilon rule must be three-sigma, sqrt-de or a positive number, got '" +
                      std::string(text) + "'");
  }
  return {Kind::explicit_value, v};
}

std::vector<std::uint64_t> RunConfig::effective_seeds() const {
  if (!seeds.empty()) return seeds;
  if (estimator.kind == EstimatorKind::subset) return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  return {0};
}

void RunConfig::validate() const {
  try {
    (void)make_model(model, params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (estimator.kind == EstimatorKind::analytic && model != "gaussian-ball") {
    throw ConfigError("the analytic estimator is only available for gaussian-ball");
  }
  if (estimator.kind == EstimatorKind::subset) {
    try {
      estimator.subset.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (estimator.mc_samples < 100) throw ConfigError("mc_samples must be >= 100");
  if (estimator.analytic_points < 2) throw ConfigError("analytic_points must be >= 2");
  if (epsilon_rule.kind == EpsilonRule::Kind::explicit_value && !(epsilon_rule.value > 0.0)) {
    throw ConfigError("explicit epsilon must be positive");
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ConfigError("seeds must be distinct");
  if (output_dir.empty()) throw ConfigError("output directory must not be empty");
}

RunConfig SweepConfig::at(double value) const {
  RunConfig c = base;
  c.params[variable] = value;
  return c;
}

void SweepConfig::validate() const {
  if (variable != "d" && variable != "sigma") {
    throw ConfigError("sweep variable must be 'd' or 'sigma'");
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw ConfigError("sweep values must be strictly increasing");
  }
  base.validate();
  for (double v : values) at(v).validate();
}

json to_json(const RunConfig& c) {
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  json eps = c.epsilon_rule.kind == EpsilonRule::Kind::explicit_value ? json(c.epsilon_rule.value)
                                                                       : json(c.epsilon_rule.label());
  return json{
      {"model", {{"name", c.model}, {"params", params}}},
      {"estimator",
       {{"kind", to_string(c.estimator.kind)},
        {"p0", c.estimator.subset.p0},
        {"n_per_level", c.estimator.subset.n_per_level},
        {"max_levels", c.estimator.subset.max_levels},
        {"stop_rel_increment", c.estimator.subset.stop_rel_increment},
        {"thinning", c.estimator.subset.thinning},
        {"mc_samples", c.estimator.mc_samples},
        {"analytic_points", c.estimator.analytic_points}}},
      {"epsilon_rule", eps},
      {"seeds", c.seeds},
      {"output", {{"dir", c.output_dir}, {"format", to_string(c.format)}}},
  };
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown_keys(j, {"model", "estimator", "epsilon_rule", "seeds", "output"}, "run config");
  RunConfig c;
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown_keys(m, {"name", "params"}, "model");
    c.model = get_or<std::string>(m, "name", c.model);
    if (m.contains("params")) {
      const json& p = m.at("params");
      if (!p.is_object()) throw ConfigError("model.params must be an object");
      c.params.clear();
      for (const auto& [k, v] : p.items()) {
        if (!v.is_number()) throw ConfigError("model parameter '" + k + "' must be a number");
        c.params[k] = v.get<double>();
      }
    }
  }
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    reject_unknown_keys(e,
                        {"kind", "p0", "n_per_level", "max_levels", "stop_rel_increment", "thinning",
                         "mc_samples", "analytic_points"},
                        "estimator");
    c.estimator.kind = parse_estimator_kind(get_or<std::string>(e, "kind", to_string(c.estimator.kind)));
    auto& s = c.estimator.subset;
    s.p0 = get_or(e, "p0", s.p0);
    s.n_per_level = get_or(e, "n_per_level", s.n_per_level);
    s.max_levels = get_or(e, "max_levels", s.max_levels);
    s.stop_rel_increment = get_or(e, "stop_rel_increment", s.stop_rel_increment);
    s.thinning = get_or(e, "thinning", s.thinning);
    c.estimator.mc_samples = get_or(e, "mc_samples", c.estimator.mc_samples);
    c.estimator.analytic_points = get_or(e, "analytic_points", c.estimator.analytic_points);
  }
  if (j.contains("epsilon_rule")) {
    const json& r = j.at("epsilon_rule");
    if (r.is_number()) {
      c.epsilon_rule = {EpsilonRule::Kind::explicit_value, r.get<double>()};
    } else if (r.is_string()) {
      c.epsilon_rule = EpsilonRule::parse(r.get<std::string>());
    } else {
      throw ConfigError("epsilon_rule must be a string or a number");
    }
  }
  c.seeds = get_or(j, "seeds", c.seeds);
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown_keys(o, {"dir", "format"}, "output");
    c.output_dir = get_or(o, "dir", c.output_dir);
    c.format = parse_output_format(get_or<std::string>(o, "format", to_string(c.format)));
  }
  return c;
}

json to_json(const SweepConfig& c) {
  return json{{"base", to_json(c.base)}, {"sweep_variable", c.variable}, {"values", c.values}};
}

SweepConfig sweep_config_from_json(const json& j) {
  reject_unknown_keys(j, {"base", "sweep_variable", "values"}, "sweep config");
  SweepConfig c;
  if (j.contains("base")) c.base = run_config_from_json(j.at("base"));
  c.variable = get_or(j, "sweep_variable", c.variable);
  c.values = get_or(j, "values", c.values);
  return c;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace ccdfx::cli
