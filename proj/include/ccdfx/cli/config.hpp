#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccdfx/curves.hpp"
#include "ccdfx/estimator.hpp"
#include "ccdfx/model.hpp"

namespace ccdfx::cli {

/// Malformed or inconsistent configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EstimatorKind { analytic, mc, subset };
enum class OutputFormat { csv, json };

std::string to_string(EstimatorKind kind);
std::string to_string(OutputFormat format);
EstimatorKind parse_estimator_kind(std::string_view text);
OutputFormat parse_output_format(std::string_view text);

/// How epsilon is chosen from a posterior summary.
struct EpsilonRule {
  enum class Kind { three_sigma, sqrt_de, explicit_value };
  Kind kind = Kind::three_sigma;
  double value = 0.0;

  double resolve(const PosteriorSummary& summary) const;
  /// "three-sigma", "sqrt-de", or the explicit value.
  std::string label() const;
  /// Accepts "three-sigma", "sqrt-de" or a positive number.
  static EpsilonRule parse(std::string_view text);
};

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::subset;
  SubsetConfig subset;
  Eigen::Index mc_samples = 100000;
  Eigen::Index analytic_points = 10000;
};

struct RunConfig {
  std::string model = "gaussian-ball";
  ModelParameters params = {{"sigma", 0.01}, {"d", 10.0}};
  EstimatorConfig estimator;
  EpsilonRule epsilon_rule;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
  OutputFormat format = OutputFormat::csv;

  /// Seeds to run: the configured list, or 0..9 for subset runs and {0}
  /// otherwise when none were given.
  std::vector<std::uint64_t> effective_seeds() const;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

struct SweepConfig {
  RunConfig base;
  std::string variable = "d";
  std::vector<double> values;

  /// The base config with the swept parameter set to `value`.
  RunConfig at(double value) const;
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const SweepConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
SweepConfig sweep_config_from_json(const nlohmann::json& j);

/// Reads and parses a JSON document; ConfigError on I/O or syntax errors.
nlohmann::json load_json_file(const std::string& path);

}  // namespace ccdfx::cli
