#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccdfx/curves.hpp"
#include "ccdfx/model.hpp"

namespace ccdfx {

struct SubsetConfig {
  double p0 = 0.1;
  Eigen::Index n_per_level = 1000;
  int max_levels = 200;
  std::uint64_t seed = 0;
  double stop_rel_increment = 1e-6;

  /// Survivor chains per adaptation batch, as a fraction of the seeds.
  double adaptation_fraction = 0.1;
  double initial_scale = 0.6;
  /// MCMC steps per retained conditional sample.
  Eigen::Index thinning = 3;

  /// Number of survivor seeds per level, p0 * n_per_level.
  Eigen::Index seeds_per_level() const;

  /// Throws std::invalid_argument unless 1/n <= p0 <= 0.5 and p0 * n is an
  /// integer.
  void validate() const;
};

enum class StopReason { single_level, evidence_converged, threshold_stagnated, max_levels };

std::string to_string(StopReason reason);

struct EstimatedCurves {
  CcdfCurve ccdf;
  SlfCurve slf;
  std::vector<double> level_log_thresholds;
  int n_levels_used = 1;
  std::vector<double> acceptance_rates;
  std::vector<double> proposal_scales;
  StopReason stop_reason = StopReason::single_level;
  std::vector<std::string> warnings;
};

/// Plain Monte Carlo: n prior draws, ln L sorted descending, the i-th
/// largest placed at x = (i - 1/2)/n.
EstimatedCurves mc_ccdf(const LikelihoodModel& model, Eigen::Index n, std::uint64_t seed);

/// Subset simulation. Level j holds n_per_level samples conditioned on
/// ln L above the j-th threshold. Survivors are the samples strictly above
/// it: p0 n of them unless repeated chain states tie at the quantile, in
/// which case fewer. X(l_j) is the running product m_j of survivors/n
/// (p0^j without ties) and the i-th largest sample of level j sits at
/// x = m_j (i - 1/2)/n. Levels
/// stop once the remaining tail can no longer move the evidence by
/// stop_rel_increment, when thresholds stagnate, or at max_levels.
EstimatedCurves subset_ccdf(const LikelihoodModel& model, const SubsetConfig& config);

/// Robbins-Monro scale adaptation toward an acceptance rate of 0.44:
/// after batch i the scale is multiplied by exp((a_i - 0.44)/sqrt(i)) and
/// clamped to [1e-3, 1).
class ProposalAdapter {
 public:
  static constexpr double kTargetAcceptance = 0.44;
  static constexpr double kMinScale = 1e-3;
  static constexpr double kMaxScale = 0.999;

  explicit ProposalAdapter(double initial_scale = 0.6);

  double scale() const { return scale_; }
  int batches() const { return batches_; }
  double update(double batch_acceptance);
  void restart_schedule() { batches_ = 0; }

 private:
  double scale_;
  int batches_ = 0;
};

/// Replays `acceptance_history` through a fresh ProposalAdapter.
double adapt_proposal(std::span<const double> acceptance_history, double initial_scale = 0.6);

/// Output of one level of conditional sampling.
struct ConditionalSamples {
  std::vector<Eigen::VectorXd> states;  // standard-normal coordinates
  std::vector<double> log_likelihoods;
  double acceptance_rate = 0.0;
  std::size_t proposals = 0;
};

/// Grows `seeds` (all strictly above `log_threshold`) into `n_total` states
/// with adaptive conditional sampling in standard-normal space: component k
/// is proposed from N(rho_k u_k, 1 - rho_k^2) with sigma_k = min(1, scale *
/// s_k), s_k the seed spread, and the move is kept iff ln L > threshold.
/// Chain c draws from its own stream derived from (seed, stream_base + c).
ConditionalSamples sample_conditional_level(const LikelihoodModel& model,
                                            const std::vector<Eigen::VectorXd>& seeds,
                                            const std::vector<double>& seed_log_likelihoods,
                                            double log_threshold, Eigen::Index n_total,
                                            ProposalAdapter& adapter, std::uint64_t seed,
                                            std::uint64_t stream_base,
                                            Eigen::Index chains_per_batch,
                                            Eigen::Index thinning = 1);

}  // namespace ccdfx
