#include "ccdfx/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ccdfx/random.hpp"

namespace ccdfx {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_points(const SlfCurve& slf, const QuadratureOptions& opts) {
  if (opts.min_points < 2) throw std::invalid_argument("QuadratureOptions: min_points must be >= 2");
  if (slf.size() < opts.min_points) {
    throw std::invalid_argument("SLF has fewer points than QuadratureOptions::min_points");
  }
}

// ln of the posterior-mass panels used for sampling: head, interior
// trapezoids, tail. Panel k spans [edge_k, edge_{k+1}] in ln x, with the
// head starting at x = 0 (ln x = -inf).
struct MassPanels {
  std::vector<double> log_mass;
  std::vector<double> log_lo;
  std::vector<double> log_hi;
};

MassPanels mass_panels(const SlfCurve& slf) {
  const auto& lx = slf.log_x();
  const auto& y = slf.log_l();
  const Eigen::Index n = slf.size();
  MassPanels p;
  p.log_mass.push_back(lx[0] + y[0]);
  p.log_lo.push_back(kNegInf);
  p.log_hi.push_back(lx[0]);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    p.log_mass.push_back(log_diff_exp(lx[i + 1], lx[i]) + log_sum_exp(y[i], y[i + 1]) - kLn2);
    p.log_lo.push_back(lx[i]);
    p.log_hi.push_back(lx[i + 1]);
  }
  if (lx[n - 1] < 0.0) {
    p.log_mass.push_back(log_diff_exp(0.0, lx[n - 1]) + y[n - 1]);
    p.log_lo.push_back(lx[n - 1]);
    p.log_hi.push_back(0.0);
  }
  return p;
}

}  // namespace

Eigen::ArrayXd log_node_weights(const SlfCurve& slf, const QuadratureOptions& opts) {
  check_points(slf, opts);
  const auto& lx = slf.log_x();
  const Eigen::Index n = slf.size();
  Eigen::ArrayXd w(n);
  switch (opts.method) {
    case QuadratureMethod::trapezoid_x:
      w[0] = log_sum_exp(lx[0], lx[1]) - kLn2;
      for (Eigen::Index i = 1; i + 1 < n; ++i) w[i] = log_diff_exp(lx[i + 1], lx[i - 1]) - kLn2;
      w[n - 1] = log_diff_exp(0.0, log_sum_exp(lx[n - 1], lx[n - 2]) - kLn2);
      break;
    case QuadratureMethod::rectangle_left:
      w[0] = lx[1];
      for (Eigen::Index i = 1; i + 1 < n; ++i) w[i] = log_diff_exp(lx[i + 1], lx[i]);
      w[n - 1] = log_diff_exp(0.0, lx[n - 1]);
      break;
  }
  return w;
}

EvidenceEstimate evidence_estimate(const SlfCurve& slf, const QuadratureOptions& opts) {
  const Eigen::ArrayXd w = log_node_weights(slf, opts);
  LogSumExp acc;
  for (Eigen::Index i = 0; i < slf.size(); ++i) acc.add(w[i] + slf.log_l()[i]);
  EvidenceEstimate out;
  out.log_z = acc.value();
  const auto sup = slf.log_l_sup();
  if (sup && *sup > slf.log_l()[0]) {
    out.log_truncation_bound = slf.log_x()[0] + log_diff_exp(*sup, slf.log_l()[0]);
  }
  if (out.log_truncation_bound > std::log(opts.max_truncation_fraction) + out.log_z) {
    std::ostringstream msg;
    msg << "evidence head-panel truncation bound exp(" << out.log_truncation_bound
        << ") exceeds " << opts.max_truncation_fraction << " of z = exp(" << out.log_z
        << "); the curve stops at x = exp(" << slf.log_x()[0]
        << "), rerun the estimator with more levels";
    throw EstimationError(msg.str());
  }
  return out;
}

double log_evidence(const SlfCurve& slf, const QuadratureOptions& opts) {
  return evidence_estimate(slf, opts).log_z;
}

double log_evidence_from_ccdf(const CcdfCurve& ccdf) {
  const auto& l = ccdf.log_l();
  const auto& lx = ccdf.log_x();
  // Below the smallest tabulated likelihood every prior draw exceeds l.
  LogSumExp acc;
  acc.add(l[0]);
  for (Eigen::Index i = 0; i + 1 < ccdf.size(); ++i) {
    acc.add(log_sum_exp(lx[i], lx[i + 1]) - kLn2 + log_diff_exp(l[i + 1], l[i]));
  }
  return acc.value();
}

YMoments posterior_moments_y(const SlfCurve& slf, double log_z, const QuadratureOptions& opts) {
  const Eigen::ArrayXd w = log_node_weights(slf, opts);
  const Eigen::ArrayXd p = (w + slf.log_l() - log_z).exp();
  const double total = p.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw EstimationError("posterior weights do not normalise; ln z is inconsistent with the curve");
  }
  const Eigen::ArrayXd q = p / total;
  YMoments m;
  m.mean = (q * slf.log_l()).sum();
  double var = (q * (slf.log_l() - m.mean).square()).sum();
  if (var < -1e-9) throw EstimationError("negative posterior variance of ln L");
  m.variance = std::max(var, 0.0);
  return m;
}

PosteriorSummary summarize(const SlfCurve& slf, const QuadratureOptions& opts) {
  const double log_z = log_evidence(slf, opts);
  const YMoments m = posterior_moments_y(slf, log_z, opts);
  return PosteriorSummary::from_moments(log_z, m.mean, m.variance);
}

DensityCurve posterior_pdf_x(const SlfCurve& slf, double log_z) {
  return DensityCurve{slf.x(), slf.log_l() - log_z, DensityDomain::x_space};
}

YDensity posterior_pdf_y(const CcdfCurve& ccdf, double log_z, Eigen::Index half_width) {
  if (half_width < 1) throw std::invalid_argument("posterior_pdf_y: half_width must be >= 1");
  const auto& l = ccdf.log_l();
  const auto& lx = ccdf.log_x();
  const Eigen::Index n = ccdf.size();
  std::vector<double> ys, logs;
  YDensity out;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half_width);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half_width);
    const double slope = hi > lo ? (lx[hi] - lx[lo]) / (l[hi] - l[lo]) : 0.0;
    if (!std::isfinite(lx[i]) || !(slope < 0.0) || !std::isfinite(slope)) {
      out.dropped_log_l.push_back(l[i]);
      continue;
    }
    ys.push_back(l[i]);
    logs.push_back(l[i] - log_z + lx[i] + std::log(-slope));
  }
  out.density.domain = DensityDomain::y_space;
  out.density.abscissa = Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  out.density.log_density =
      Eigen::Map<Eigen::ArrayXd>(logs.data(), static_cast<Eigen::Index>(logs.size()));
  return out;
}

std::vector<double> sample_posterior_log_x(const SlfCurve& slf, double log_z, std::size_t n,
                                           std::uint64_t seed) {
  const MassPanels panels = mass_panels(slf);
  const double log_total = log_sum_exp(panels.log_mass);
  if (!std::isfinite(log_total)) throw EstimationError("posterior mass is not finite");
  (void)log_z;  // panels are normalised by their own total
  std::vector<double> cumulative(panels.log_mass.size());
  double running = 0.0;
  for (std::size_t k = 0; k < cumulative.size(); ++k) {
    running += std::exp(panels.log_mass[k] - log_total);
    cumulative[k] = running;
  }
  Rng rng = make_rng(seed, 0);
  std::vector<double> out(n);
  for (auto& draw : out) {
    const double u = uniform_open(rng) * running;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t k = std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
    const double before = k == 0 ? 0.0 : cumulative[k - 1];
    const double width = cumulative[k] - before;
    const double frac = std::clamp(width > 0.0 ? (u - before) / width : 0.5, 1e-300, 1.0);
    const double lo = panels.log_lo[k], hi = panels.log_hi[k];
    // x = x_lo + frac (x_hi - x_lo), evaluated in logs.
    draw = lo == kNegInf ? hi + std::log(frac)
                         : log_sum_exp(lo, std::log(frac) + log_diff_exp(hi, lo));
    draw = std::min(draw, 0.0);
  }
  return out;
}

std::vector<double> sample_posterior_x(const SlfCurve& slf, double log_z, std::size_t n,
                                       std::uint64_t seed) {
  std::vector<double> out = sample_posterior_log_x(slf, log_z, n, seed);
  for (auto& v : out) v = std::exp(v);
  return out;
}

}  // namespace ccdfx
