#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccdfx/cli/config.hpp"
#include "ccdfx/estimator.hpp"
#include "ccdfx/functionals.hpp"
#include "ccdfx/hps.hpp"

namespace ccdfx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitEstimator = 2;
inline constexpr int kExitValidation = 3;

/// Everything computed for one seed of one configuration.
struct SeedResult {
  std::uint64_t seed = 0;
  SlfCurve slf;
  CcdfCurve ccdf;
  EvidenceEstimate evidence;
  PosteriorSummary summary;
  HpsReport hps;
  HpsVolume hps_volume;
  double hps_empirical_probability = 0.0;
  DensityCurve density_x;
  YDensity density_y;
  /// Absent for the analytic estimator.
  std::optional<EstimatedCurves> diagnostics;
};

/// Curves + summary + HPS for one seed. With `full` false only the summary
/// and HPS report are filled (sweeps).
SeedResult run_seed(const RunConfig& config, std::uint64_t seed, bool full = true);

/// Runs every seed concurrently; results come back in seed order.
std::vector<SeedResult> run_seeds(const RunConfig& config, bool full = true);

int cmd_analyze(const RunConfig& config, std::ostream& log);
int cmd_sweep(const SweepConfig& config, std::ostream& log);

struct ValidateOptions {
  std::string output_dir = ".";
  /// Offsets every log-gamma evaluation; negative-control hook.
  double log_gamma_fault = 0.0;
  double soft_budget_seconds = 300.0;
};

int cmd_validate(const ValidateOptions& options, std::ostream& log);

/// Column order of sweep.csv after the swept variable.
const std::vector<std::string>& sweep_columns();

}  // namespace ccdfx::cli
