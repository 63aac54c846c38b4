#include "ccdfx/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ccdfx/numerics.hpp"
#include "ccdfx/random.hpp"

namespace ccdfx {

namespace {

double checked_log_likelihood(const LikelihoodModel& model, const Eigen::VectorXd& u) {
  const double y = model.log_likelihood_standard(u);
  if (std::isnan(y)) {
    throw EstimationError("model '" + model.name() + "' returned a NaN log-likelihood");
  }
  return y;
}

std::vector<Eigen::Index> descending_order(const std::vector<double>& y) {
  std::vector<Eigen::Index> order(y.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&y](Eigen::Index a, Eigen::Index b) { return y[a] > y[b]; });
  return order;
}

// Points arrive level by level in decreasing x; the curve wants increasing x.
EstimatedCurves assemble(std::vector<double> log_x, std::vector<double> log_l,
                         std::optional<double> log_l_sup) {
  std::reverse(log_x.begin(), log_x.end());
  std::reverse(log_l.begin(), log_l.end());
  SlfCurve slf(Eigen::Map<Eigen::ArrayXd>(log_x.data(), static_cast<Eigen::Index>(log_x.size())),
               Eigen::Map<Eigen::ArrayXd>(log_l.data(), static_cast<Eigen::Index>(log_l.size())),
               log_l_sup);
  CcdfCurve ccdf = to_ccdf(slf);
  return EstimatedCurves{std::move(ccdf), std::move(slf), {}, 1, {}, {}, StopReason::single_level, {}};
}

}  // namespace

Eigen::Index SubsetConfig::seeds_per_level() const {
  return static_cast<Eigen::Index>(std::llround(p0 * static_cast<double>(n_per_level)));
}

void SubsetConfig::validate() const {
  if (n_per_level < 2) throw std::invalid_argument("SubsetConfig: n_per_level must be >= 2");
  const double n = static_cast<double>(n_per_level);
  if (!(p0 >= 1.0 / n && p0 <= 0.5)) {
    throw std::invalid_argument("SubsetConfig: p0 must satisfy 1/n_per_level <= p0 <= 0.5");
  }
  if (std::abs(p0 * n - static_cast<double>(seeds_per_level())) > 1e-9 * n) {
    throw std::invalid_argument("SubsetConfig: p0 * n_per_level must be an integer");
  }
  if (thinning < 1) throw std::invalid_argument("SubsetConfig: thinning must be >= 1");
  if (max_levels < 1) throw std::invalid_argument("SubsetConfig: max_levels must be >= 1");
  if (!(stop_rel_increment > 0.0)) {
    throw std::invalid_argument("SubsetConfig: stop_rel_increment must be positive");
  }
  if (!(adaptation_fraction > 0.0 && adaptation_fraction <= 1.0)) {
    throw std::invalid_argument("SubsetConfig: adaptation_fraction must lie in (0, 1]");
  }
  if (!(initial_scale >= ProposalAdapter::kMinScale && initial_scale <= ProposalAdapter::kMaxScale)) {
    throw std::invalid_argument("SubsetConfig: initial_scale must lie in [1e-3, 1)");
  }
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::single_level: return "single-level";
    case StopReason::evidence_converged: return "evidence-converged";
    case StopReason::threshold_stagnated: return "threshold-stagnated";
    case StopReason::max_levels: return "max-levels";
  }
  return "unknown";
}

ProposalAdapter::ProposalAdapter(double initial_scale)
    : scale_(std::clamp(initial_scale, kMinScale, kMaxScale)) {}

double ProposalAdapter::update(double batch_acceptance) {
  ++batches_;
  scale_ *= std::exp((batch_acceptance - kTargetAcceptance) /
                     std::sqrt(static_cast<double>(batches_)));
  scale_ = std::clamp(scale_, kMinScale, kMaxScale);
  return scale_;
}

double adapt_proposal(std::span<const double> acceptance_history, double initial_scale) {
  if (acceptance_history.empty()) {
    throw std::invalid_argument("adapt_proposal: needs at least one completed batch");
  }
  ProposalAdapter adapter(initial_scale);
  for (double a : acceptance_history) adapter.update(a);
  return adapter.scale();
}

ConditionalSamples sample_conditional_level(const LikelihoodModel& model,
                                            const std::vector<Eigen::VectorXd>& seeds,
                                            const std::vector<double>& seed_log_likelihoods,
                                            double log_threshold, Eigen::Index n_total,
                                            ProposalAdapter& adapter, std::uint64_t seed,
                                            std::uint64_t stream_base,
                                            Eigen::Index chains_per_batch,
                                            Eigen::Index thinning) {
  if (thinning < 1) throw std::invalid_argument("sample_conditional_level: thinning must be >= 1");
  const auto n_chains = static_cast<Eigen::Index>(seeds.size());
  if (n_chains == 0 || seed_log_likelihoods.size() != seeds.size()) {
    throw std::invalid_argument("sample_conditional_level: seeds and likelihoods must match");
  }
  if (n_total < n_chains) throw std::invalid_argument("sample_conditional_level: n_total < seeds");
  const Eigen::Index d = model.dimension();

  // Per-component spread of the seeds sets the relative proposal widths.
  Eigen::ArrayXd spread = Eigen::ArrayXd::Ones(d);
  if (n_chains >= 2) {
    Eigen::MatrixXd stacked(d, n_chains);
    for (Eigen::Index c = 0; c < n_chains; ++c) stacked.col(c) = seeds[c];
    const Eigen::VectorXd mean = stacked.rowwise().mean();
    const Eigen::ArrayXd var =
        (stacked.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(n_chains);
    spread = var.sqrt();
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!(spread[k] > 0.0)) spread[k] = 1.0;
    }
  }

  ConditionalSamples out;
  out.states.reserve(n_total);
  out.log_likelihoods.reserve(n_total);
  const Eigen::Index base_length = n_total / n_chains;
  const Eigen::Index extra = n_total % n_chains;
  const Eigen::Index batch = std::max<Eigen::Index>(1, chains_per_batch);
  std::size_t accepted_total = 0;
  std::normal_distribution<double> normal;

  for (Eigen::Index first = 0; first < n_chains; first += batch) {
    const Eigen::ArrayXd sigma = (adapter.scale() * spread).min(1.0);
    const Eigen::ArrayXd rho = (1.0 - sigma.square()).sqrt();
    std::size_t accepted = 0, proposals = 0;
    for (Eigen::Index c = first; c < std::min(first + batch, n_chains); ++c) {
      Rng rng = make_rng(seed, stream_base + static_cast<std::uint64_t>(c));
      Eigen::VectorXd u = seeds[c];
      double y = seed_log_likelihoods[c];
      if (!(y > log_threshold)) {
        throw std::invalid_argument("sample_conditional_level: seed not above the threshold");
      }
      out.states.push_back(u);
      out.log_likelihoods.push_back(y);
      const Eigen::Index length = base_length + (c < extra ? 1 : 0);
      Eigen::VectorXd candidate(d);
      for (Eigen::Index step = 1; step < length; ++step) {
        for (Eigen::Index t = 0; t < thinning; ++t) {
          for (Eigen::Index k = 0; k < d; ++k) candidate[k] = rho[k] * u[k] + sigma[k] * normal(rng);
          const double y_candidate = checked_log_likelihood(model, candidate);
          ++proposals;
          if (y_candidate > log_threshold) {
            u = candidate;
            y = y_candidate;
            ++accepted;
          }
        }
        out.states.push_back(u);
        out.log_likelihoods.push_back(y);
      }
    }
    if (proposals > 0) {
      adapter.update(static_cast<double>(accepted) / static_cast<double>(proposals));
    }
    accepted_total += accepted;
    out.proposals += proposals;
  }
  out.acceptance_rate =
      out.proposals > 0 ? static_cast<double>(accepted_total) / static_cast<double>(out.proposals) : 0.0;
  return out;
}

EstimatedCurves mc_ccdf(const LikelihoodModel& model, Eigen::Index n, std::uint64_t seed) {
  if (n < 100) throw std::invalid_argument("mc_ccdf: n must be >= 100");
  Rng rng = make_rng(seed, 0);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = checked_log_likelihood(model, standard_normal_vector(model.dimension(), rng));
  // Ascending ln L is descending x, the order assemble() expects.
  std::sort(y.begin(), y.end());
  std::vector<double> log_x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    log_x[i] = std::log((static_cast<double>(y.size() - i) - 0.5) / static_cast<double>(n));
  }
  return assemble(std::move(log_x), std::move(y), model.log_likelihood_sup());
}

EstimatedCurves subset_ccdf(const LikelihoodModel& model, const SubsetConfig& config) {
  config.validate();
  const Eigen::Index n = config.n_per_level;
  const Eigen::Index n_seeds = config.seeds_per_level();
  const double log_n = std::log(static_cast<double>(n));
  const auto chains_per_batch = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::llround(config.adaptation_fraction * static_cast<double>(n_seeds))));

  std::vector<Eigen::VectorXd> states(static_cast<std::size_t>(n));
  std::vector<double> y(static_cast<std::size_t>(n));
  {
    Rng rng = make_rng(config.seed, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      states[i] = standard_normal_vector(model.dimension(), rng);
      y[i] = checked_log_likelihood(model, states[i]);
    }
  }

  std::vector<double> kept_log_x, kept_log_l;
  std::vector<double> thresholds, acceptance, scales;
  std::vector<std::string> warnings;
  LogSumExp evidence;
  ProposalAdapter adapter(config.initial_scale);
  StopReason reason = StopReason::max_levels;
  int level = 0;
  double log_level_mass = 0.0;

  for (;; ++level) {
    const auto order = descending_order(y);
    auto log_x_at = [&](Eigen::Index i) {
      return log_level_mass + std::log(static_cast<double>(i) + 0.5) - log_n;
    };

    bool last = false;
    double threshold = 0.0;
    // Survivors strictly above the threshold. Rejected moves repeat states,
    // so ties at the quantile are common; they shrink the survivor count
    // and the level probability becomes survivors / n.
    Eigen::Index survivors = n_seeds;
    if (level + 1 >= config.max_levels) {
      last = true;
      reason = level == 0 ? StopReason::single_level : StopReason::max_levels;
    } else {
      threshold = y[order[n_seeds]];
      while (survivors > 0 && y[order[survivors - 1]] == threshold) --survivors;
      if (survivors == 0) {
        last = true;
        reason = level == 0 && y[order.front()] == y[order.back()] ? StopReason::single_level
                                                                    : StopReason::threshold_stagnated;
      } else if (!thresholds.empty() &&
                 std::abs(threshold - thresholds.back()) <=
                     1e-12 * std::max(1.0, std::abs(threshold))) {
        last = true;
        reason = StopReason::threshold_stagnated;
      } else {
        LogSumExp tentative = evidence;
        for (Eigen::Index i = survivors; i < n; ++i) tentative.add(log_level_mass - log_n + y[order[i]]);
        const double log_tail =
            log_level_mass + std::log(static_cast<double>(survivors)) - log_n + y[order.front()];
        if (log_tail < std::log(config.stop_rel_increment) + tentative.value()) {
          last = true;
          reason = StopReason::evidence_converged;
        }
      }
    }

    const Eigen::Index keep_from = last ? 0 : survivors;
    for (Eigen::Index i = n - 1; i >= keep_from; --i) {
      kept_log_x.push_back(log_x_at(i));
      kept_log_l.push_back(y[order[i]]);
      evidence.add(log_level_mass - log_n + y[order[i]]);
    }
    if (last) break;

    std::vector<Eigen::VectorXd> seeds;
    std::vector<double> seed_y;
    seeds.reserve(survivors);
    seed_y.reserve(survivors);
    for (Eigen::Index i = 0; i < survivors; ++i) {
      seeds.push_back(states[order[i]]);
      seed_y.push_back(y[order[i]]);
    }
    thresholds.push_back(threshold);
    log_level_mass += std::log(static_cast<double>(survivors)) - log_n;
    adapter.restart_schedule();
    const std::uint64_t stream_base = static_cast<std::uint64_t>(level + 1) << 32;
    ConditionalSamples next = sample_conditional_level(model, seeds, seed_y, threshold, n, adapter,
                                                       config.seed, stream_base, chains_per_batch,
                                                       config.thinning);
    acceptance.push_back(next.acceptance_rate);
    scales.push_back(adapter.scale());
    if (next.acceptance_rate < 0.1 || next.acceptance_rate > 0.7) {
      std::ostringstream msg;
      msg << "level " << level + 1 << " acceptance " << next.acceptance_rate
          << " outside [0.1, 0.7]";
      warnings.push_back(msg.str());
    }
    states = std::move(next.states);
    y = std::move(next.log_likelihoods);
  }

  EstimatedCurves out = assemble(std::move(kept_log_x), std::move(kept_log_l), model.log_likelihood_sup());
  out.level_log_thresholds = std::move(thresholds);
  out.n_levels_used = level + 1;
  out.acceptance_rates = std::move(acceptance);
  out.proposal_scales = std::move(scales);
  out.stop_reason = reason;
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace ccdfx
