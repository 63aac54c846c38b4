#include "ccdfx/cli/commands.hpp"

#include <filesystem>
#include <future>
#include <limits>
#include <ostream>

#include "ccdfx/analytic.hpp"
#include "ccdfx/cli/output.hpp"
#include "ccdfx/stats.hpp"

namespace ccdfx::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kHpsProbabilityDraws = 10000;

GaussianBallParams ball_params(const RunConfig& config) {
  return GaussianBallParams(config.params.at("sigma"),
                            static_cast<Eigen::Index>(config.params.at("d")));
}

Eigen::Index density_half_width(const RunConfig& config) {
  switch (config.estimator.kind) {
    case EstimatorKind::analytic: return 1;
    case EstimatorKind::mc: return std::max<Eigen::Index>(1, config.estimator.mc_samples / 200);
    case EstimatorKind::subset:
      return std::max<Eigen::Index>(1, config.estimator.subset.n_per_level / 20);
  }
  return 1;
}

json summary_json(const PosteriorSummary& s) {
  return {{"log_z", s.log_z},     {"mean_Y", s.mean_y},   {"var_Y", s.var_y},
          {"info_gain_G", s.info_gain}, {"sigma_p", s.sigma_p}, {"d_e", s.d_e}};
}

json hps_json(const SeedResult& r, bool full) {
  const HpsReport& h = r.hps;
  json j = {{"epsilon", h.epsilon},
            {"center_G", h.center_g},
            {"prob_lower_bound", h.prob_lower_bound},
            {"vol_lower", h.vol_lower()},
            {"vol_upper", h.vol_upper()},
            {"log_vol_lower", h.log_vol_lower},
            {"log_vol_upper", h.log_vol_upper},
            {"ln_pX_interval", {h.ln_px_interval.first, h.ln_px_interval.second}},
            {"ln_L_interval", {h.ln_l_interval.first, h.ln_l_interval.second}},
            {"mode_excluded", h.mode_excluded},
            {"chebyshev_vacuous", h.chebyshev_vacuous}};
  if (full) {
    j["measured_volume"] = r.hps_volume.volume();
    j["log_measured_volume"] = r.hps_volume.log_volume;
    j["volume_extends_below_curve"] = r.hps_volume.extends_below_curve;
    j["empirical_probability"] = r.hps_empirical_probability;
  }
  return j;
}

json estimator_json(const RunConfig& config, const SeedResult& r) {
  json j = {{"kind", to_string(config.estimator.kind)},
            {"curve_points", r.slf.size()},
            {"quadrature_log_z", r.evidence.log_z},
            {"log_truncation_bound", r.evidence.log_truncation_bound}};
  if (r.diagnostics) {
    const EstimatedCurves& e = *r.diagnostics;
    j["n_levels_used"] = e.n_levels_used;
    j["stop_reason"] = to_string(e.stop_reason);
    j["level_log_thresholds"] = e.level_log_thresholds;
    j["acceptance_rates"] = e.acceptance_rates;
    j["proposal_scales"] = e.proposal_scales;
    j["warnings"] = e.warnings;
  }
  if (!r.density_y.dropped_log_l.empty()) {
    j["density_y_dropped_points"] = r.density_y.dropped_log_l.size();
  }
  return j;
}

json moments_json(std::span<const double> values) {
  const SampleMoments m = sample_moments(values);
  return {{"mean", m.mean}, {"stddev", m.stddev}, {"standard_error", m.standard_error()}};
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::string curves_document(const std::vector<SeedResult>& results, OutputFormat format) {
  if (format == OutputFormat::csv) {
    CsvWriter csv({"seed", "x", "log_L"});
    for (const auto& r : results) {
      for (Eigen::Index i = 0; i < r.slf.size(); ++i) {
        csv.cell(r.seed).cell(std::exp(r.slf.log_x()[i])).cell(r.slf.log_l()[i]);
        csv.end_row();
      }
    }
    return csv.str();
  }
  json runs = json::array();
  for (const auto& r : results) {
    const Eigen::ArrayXd x = r.slf.x();
    runs.push_back({{"seed", r.seed},
                    {"x", std::vector<double>(x.begin(), x.end())},
                    {"log_L", std::vector<double>(r.slf.log_l().begin(), r.slf.log_l().end())}});
  }
  return json{{"runs", runs}}.dump(1) + "\n";
}

std::string density_document(const std::vector<SeedResult>& results, OutputFormat format, bool y_space) {
  const std::string axis = y_space ? "y" : "x";
  auto pick = [y_space](const SeedResult& r) -> const DensityCurve& {
    return y_space ? r.density_y.density : r.density_x;
  };
  if (format == OutputFormat::csv) {
    CsvWriter csv({"seed", axis, "log_density"});
    for (const auto& r : results) {
      const DensityCurve& dc = pick(r);
      for (Eigen::Index i = 0; i < dc.abscissa.size(); ++i) {
        csv.cell(r.seed).cell(dc.abscissa[i]).cell(dc.log_density[i]);
        csv.end_row();
      }
    }
    return csv.str();
  }
  json runs = json::array();
  for (const auto& r : results) {
    const DensityCurve& dc = pick(r);
    runs.push_back({{"seed", r.seed},
                    {axis, std::vector<double>(dc.abscissa.begin(), dc.abscissa.end())},
                    {"log_density", std::vector<double>(dc.log_density.begin(), dc.log_density.end())}});
  }
  return json{{"runs", runs}}.dump(1) + "\n";
}

PosteriorSummary pooled_summary(const std::vector<SeedResult>& results) {
  if (results.size() == 1) return results.front().summary;
  double log_z = 0.0, mean_y = 0.0, var_y = 0.0;
  for (const auto& r : results) {
    log_z += r.summary.log_z;
    mean_y += r.summary.mean_y;
    var_y += r.summary.var_y;
  }
  const double k = static_cast<double>(results.size());
  return PosteriorSummary::from_moments(log_z / k, mean_y / k, var_y / k);
}

}  // namespace

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> columns = {"log_z",  "G",      "sigma_p",       "d_e",
                                                   "cov",    "hps_lo", "hps_hi",        "mode_excluded",
                                                   "vol_upper"};
  return columns;
}

SeedResult run_seed(const RunConfig& config, std::uint64_t seed, bool full) {
  const LikelihoodModel model = make_model(config.model, config.params);
  std::optional<EstimatedCurves> diagnostics;
  std::optional<SlfCurve> slf;
  PosteriorSummary summary;
  EvidenceEstimate evidence;

  if (config.estimator.kind == EstimatorKind::analytic) {
    const GaussianBallParams p = ball_params(config);
    slf = analytic_slf_curve(p, config.estimator.analytic_points);
    summary = summary_analytic(p);
    evidence = evidence_estimate(*slf);
  } else {
    if (config.estimator.kind == EstimatorKind::mc) {
      diagnostics = mc_ccdf(model, config.estimator.mc_samples, seed);
    } else {
      SubsetConfig sc = config.estimator.subset;
      sc.seed = seed;
      diagnostics = subset_ccdf(model, sc);
    }
    slf = diagnostics->slf;
    evidence = evidence_estimate(*slf);
    const YMoments m = posterior_moments_y(*slf, evidence.log_z);
    summary = PosteriorSummary::from_moments(evidence.log_z, m.mean, m.variance);
  }

  const double log_l_sup = model.log_likelihood_sup().value_or(slf->log_l()[0]);
  const double epsilon = config.epsilon_rule.resolve(summary);
  SeedResult r{.seed = seed,
               .slf = *slf,
               .ccdf = to_ccdf(*slf),
               .evidence = evidence,
               .summary = summary,
               .hps = hps_report(summary, epsilon, log_l_sup),
               .hps_volume = {},
               .hps_empirical_probability = 0.0,
               .density_x = {},
               .density_y = {},
               .diagnostics = std::move(diagnostics)};
  if (full) {
    r.hps_volume = hps_volume_quadrature(r.slf, summary.log_z, summary, epsilon);
    r.hps_empirical_probability =
        empirical_hps_probability(r.slf, summary.log_z, summary, epsilon, kHpsProbabilityDraws, seed);
    r.density_x = posterior_pdf_x(r.slf, summary.log_z);
    r.density_y = posterior_pdf_y(r.ccdf, summary.log_z, density_half_width(config));
  }
  return r;
}

std::vector<SeedResult> run_seeds(const RunConfig& config, bool full) {
  std::vector<std::uint64_t> seeds = config.effective_seeds();
  if (config.estimator.kind == EstimatorKind::analytic) seeds.resize(1);  // seed-free
  std::vector<std::future<SeedResult>> jobs;
  jobs.reserve(seeds.size());
  for (std::uint64_t s : seeds) {
    jobs.push_back(std::async(std::launch::async, [&config, s, full] { return run_seed(config, s, full); }));
  }
  std::vector<SeedResult> results;
  results.reserve(jobs.size());
  for (auto& job : jobs) results.push_back(job.get());
  return results;
}

int cmd_analyze(const RunConfig& config, std::ostream& log) {
  try {
    config.validate();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<SeedResult> results;
  try {
    results = run_seeds(config);
  } catch (const std::exception& e) {
    log << "estimator failure: " << e.what() << "\n";
    return kExitEstimator;
  }

  json runs = json::array();
  for (const auto& r : results) {
    if (r.diagnostics) {
      for (const auto& w : r.diagnostics->warnings) log << "warning (seed " << r.seed << "): " << w << "\n";
    }
    runs.push_back({{"seed", r.seed},
                    {"summary", summary_json(r.summary)},
                    {"hps", hps_json(r, true)},
                    {"estimator", estimator_json(config, r)}});
  }
  const json summary_doc = {{"model", config.model}, {"config", to_json(config)}, {"runs", runs}};

  const std::string ext = config.format == OutputFormat::csv ? ".csv" : ".json";
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("summary.json", summary_doc.dump(2) + "\n");
  files.emplace_back("curves" + ext, curves_document(results, config.format));
  files.emplace_back("density_x" + ext, density_document(results, config.format, false));
  files.emplace_back("density_y" + ext, density_document(results, config.format, true));
  if (results.size() >= 2) {
    std::vector<double> log_z, g, d_e;
    for (const auto& r : results) {
      log_z.push_back(r.summary.log_z);
      g.push_back(r.summary.info_gain);
      d_e.push_back(r.summary.d_e);
    }
    const json boot = {{"n_seeds", results.size()},
                       {"log_z", moments_json(log_z)},
                       {"info_gain_G", moments_json(g)},
                       {"d_e", moments_json(d_e)}};
    files.emplace_back("bootstrap.json", boot.dump(2) + "\n");
  }

  try {
    ensure_directory(config.output_dir);
    for (const auto& [name, content] : files) {
      write_file_atomic(std::filesystem::path(config.output_dir) / name, content);
    }
  } catch (const std::exception& e) {
    log << "output failure: " << e.what() << "\n";
    return kExitConfig;
  }

  const PosteriorSummary& s = results.front().summary;
  log << config.model << " [" << to_string(config.estimator.kind) << "] seeds=" << results.size()
      << " ln z=" << format_double(s.log_z) << " G=" << format_double(s.info_gain)
      << " d_e=" << format_double(s.d_e) << " -> " << config.output_dir << "\n";
  return kExitOk;
}

int cmd_sweep(const SweepConfig& config, std::ostream& log) {
  try {
    config.validate();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<std::string> header = {config.variable};
  for (const auto& c : sweep_columns()) header.push_back(c);
  CsvWriter csv(header);
  json rows = json::array();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (double value : config.values) {
    const RunConfig point = config.at(value);
    try {
      const auto results = run_seeds(point, false);
      const PosteriorSummary s = pooled_summary(results);
      const LikelihoodModel model = make_model(point.model, point.params);
      const double sup = model.log_likelihood_sup().value_or(results.front().slf.log_l()[0]);
      const HpsReport h = hps_report(s, point.epsilon_rule.resolve(s), sup);
      const double cov = s.sigma_p / s.info_gain;
      csv.cell(value).cell(s.log_z).cell(s.info_gain).cell(s.sigma_p).cell(s.d_e).cell(cov)
          .cell(h.ln_l_interval.first).cell(h.ln_l_interval.second).cell(h.mode_excluded)
          .cell(h.vol_upper());
      csv.end_row();
      rows.push_back({{config.variable, value}, {"log_z", s.log_z}, {"G", s.info_gain},
                      {"sigma_p", s.sigma_p}, {"d_e", s.d_e}, {"cov", cov},
                      {"hps_lo", h.ln_l_interval.first}, {"hps_hi", h.ln_l_interval.second},
                      {"mode_excluded", h.mode_excluded}, {"vol_upper", h.vol_upper()}});
    } catch (const std::exception& e) {
      log << "warning: sweep point " << config.variable << "=" << format_double(value)
          << " failed: " << e.what() << "\n";
      csv.cell(value);
      for (std::size_t i = 0; i < sweep_columns().size(); ++i) csv.cell(nan);
      csv.end_row();
      json row = {{config.variable, value}};
      for (const auto& c : sweep_columns()) row[c] = nullptr;
      rows.push_back(row);
    }
  }

  try {
    ensure_directory(config.base.output_dir);
    if (config.base.format == OutputFormat::csv) {
      write_file_atomic(std::filesystem::path(config.base.output_dir) / "sweep.csv", csv.str());
    } else {
      write_file_atomic(std::filesystem::path(config.base.output_dir) / "sweep.json",
                        json{{"sweep_variable", config.variable}, {"rows", rows}}.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    log << "output failure: " << e.what() << "\n";
    return kExitConfig;
  }
  log << "sweep over " << config.values.size() << " values of " << config.variable << " -> "
      << config.base.output_dir << "\n";
  return kExitOk;
}

}  // namespace ccdfx::cli
