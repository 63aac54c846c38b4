#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccdfx/cli/commands.hpp"

namespace {

using namespace ccdfx::cli;

// Flags shared by analyze and sweep; every one overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::string> model, estimator, out, format, epsilon_rule;
  std::optional<double> sigma, d, sep, p0;
  std::optional<long> n_per_level, max_levels, mc_samples;
  std::vector<std::uint64_t> seeds;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--model", model, "gaussian-ball | gaussian-conjugate | bimodal");
    app.add_option("--sigma", sigma, "likelihood width");
    app.add_option("--d", d, "dimension");
    app.add_option("--sep", sep, "bimodal mode separation");
    app.add_option("--estimator", estimator, "analytic | mc | subset");
    app.add_option("--seed", seeds, "seed (repeatable)");
    app.add_option("--out", out, "output directory");
    app.add_option("--format", format, "csv | json");
    app.add_option("--epsilon-rule", epsilon_rule, "three-sigma | sqrt-de | <value>");
    app.add_option("--p0", p0, "subset level probability");
    app.add_option("--n-per-level", n_per_level, "subset samples per level");
    app.add_option("--max-levels", max_levels, "subset level cap");
    app.add_option("--mc-samples", mc_samples, "plain Monte Carlo sample count");
  }

  void apply(RunConfig& c) const {
    if (model && *model != c.model) {
      c.model = *model;
      c.params.clear();
      c.params["sigma"] = 0.01;
      c.params["d"] = 10.0;
      if (c.model == "bimodal") c.params["sep"] = 1.0;
    }
    if (sigma) c.params["sigma"] = *sigma;
    if (d) c.params["d"] = *d;
    if (sep) c.params["sep"] = *sep;
    if (estimator) c.estimator.kind = parse_estimator_kind(*estimator);
    if (!seeds.empty()) c.seeds = seeds;
    if (out) c.output_dir = *out;
    if (format) c.format = parse_output_format(*format);
    if (epsilon_rule) c.epsilon_rule = EpsilonRule::parse(*epsilon_rule);
    if (p0) c.estimator.subset.p0 = *p0;
    if (n_per_level) c.estimator.subset.n_per_level = *n_per_level;
    if (max_levels) c.estimator.subset.max_levels = *max_levels;
    if (mc_samples) c.estimator.mc_samples = *mc_samples;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccdfx: evidence, information gain and high-probability-set diagnostics from the likelihood CCDF"};
  app.require_subcommand(1);

  Overrides analyze_flags;
  CLI::App* analyze = app.add_subcommand("analyze", "estimate curves and summaries for one model");
  analyze_flags.attach(*analyze);

  Overrides sweep_flags;
  std::optional<std::string> variable;
  std::vector<double> values;
  CLI::App* sweep = app.add_subcommand("sweep", "tabulate summaries over d or sigma");
  sweep_flags.attach(*sweep);
  sweep->add_option("--variable", variable, "d | sigma");
  sweep->add_option("--values", values, "strictly increasing sweep values");

  ValidateOptions validate_options;
  CLI::App* validate = app.add_subcommand("validate", "run the oracle suite");
  validate->add_option("--out", validate_options.output_dir, "directory for validate.json");
  validate->add_option("--inject-log-gamma-fault", validate_options.log_gamma_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*analyze) {
      RunConfig config;
      if (!analyze_flags.config_path.empty()) {
        config = run_config_from_json(load_json_file(analyze_flags.config_path));
      }
      analyze_flags.apply(config);
      return cmd_analyze(config, std::cerr);
    }
    if (*sweep) {
      SweepConfig config;
      if (!sweep_flags.config_path.empty()) {
        config = sweep_config_from_json(load_json_file(sweep_flags.config_path));
      }
      sweep_flags.apply(config.base);
      if (variable) config.variable = *variable;
      if (!values.empty()) config.values = values;
      return cmd_sweep(config, std::cerr);
    }
    return cmd_validate(validate_options, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}
