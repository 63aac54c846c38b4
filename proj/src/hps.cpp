#include "ccdfx/hps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ccdfx/functionals.hpp"
#include "ccdfx/numerics.hpp"

namespace ccdfx {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("HPS: epsilon must be positive");
}

bool in_band(double log_l, double log_z, const PosteriorSummary& summary, double epsilon) {
  return std::abs(log_l - log_z - summary.info_gain) <= epsilon;
}

// ln x where the piecewise-linear (ln x, ln L) curve crosses `level` between
// nodes a (above) and b (below).
double crossing(const SlfCurve& slf, Eigen::Index a, Eigen::Index b, double level) {
  const double ya = slf.log_l()[a], yb = slf.log_l()[b];
  const double xa = slf.log_x()[a], xb = slf.log_x()[b];
  if (ya == yb) return xa;
  return xa + (level - ya) / (yb - ya) * (xb - xa);
}

}  // namespace

double HpsReport::vol_lower() const { return std::exp(log_vol_lower); }
double HpsReport::vol_upper() const { return std::exp(log_vol_upper); }
double HpsVolume::volume() const { return std::exp(log_volume); }

HpsReport hps_report(const PosteriorSummary& summary, double epsilon, double log_l_sup) {
  check_epsilon(epsilon);
  HpsReport r;
  r.epsilon = epsilon;
  r.center_g = summary.info_gain;
  const double chebyshev = 1.0 - summary.var_y / (epsilon * epsilon);
  r.chebyshev_vacuous = chebyshev <= 0.0;
  r.prob_lower_bound = std::clamp(chebyshev, 0.0, 1.0);
  r.log_vol_lower = r.chebyshev_vacuous ? kNegInf : std::log(chebyshev) - (summary.info_gain + epsilon);
  r.log_vol_upper = -summary.info_gain + epsilon;
  r.ln_px_interval = {summary.info_gain - epsilon, summary.info_gain + epsilon};
  r.ln_l_interval = {summary.mean_y - epsilon, summary.mean_y + epsilon};
  r.mode_excluded = log_l_sup < r.ln_l_interval.first || log_l_sup > r.ln_l_interval.second;
  return r;
}

bool hps_membership_log_x(double log_x, const SlfCurve& slf, double log_z,
                          const PosteriorSummary& summary, double epsilon) {
  check_epsilon(epsilon);
  return in_band(slf.log_l_at(log_x), log_z, summary, epsilon);
}

bool hps_membership(double x, const SlfCurve& slf, double log_z, const PosteriorSummary& summary,
                    double epsilon) {
  if (!(x > 0.0 && x <= 1.0)) throw std::out_of_range("hps_membership: x must lie in (0, 1]");
  return hps_membership_log_x(std::log(x), slf, log_z, summary, epsilon);
}

double empirical_hps_probability(const SlfCurve& slf, double log_z, const PosteriorSummary& summary,
                                 double epsilon, std::size_t n, std::uint64_t seed) {
  check_epsilon(epsilon);
  if (n == 0) throw std::invalid_argument("empirical_hps_probability: n must be positive");
  const auto draws = sample_posterior_log_x(slf, log_z, n, seed);
  std::size_t inside = 0;
  for (double lx : draws) {
    if (in_band(slf.log_l_at_extended(lx), log_z, summary, epsilon)) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(n);
}

HpsVolume hps_volume_quadrature(const SlfCurve& slf, double log_z, const PosteriorSummary& summary,
                                double epsilon) {
  check_epsilon(epsilon);
  const double lo = log_z + summary.info_gain - epsilon;
  const double hi = log_z + summary.info_gain + epsilon;
  const auto& y = slf.log_l();
  const Eigen::Index n = slf.size();
  HpsVolume v;

  // Upper end: last x with ln L >= lo.
  if (y[n - 1] >= lo) {
    v.log_x_hi = 0.0;
    v.extends_above_curve = slf.log_x()[n - 1] < 0.0;
  } else if (y[0] < lo) {
    v.log_volume = kNegInf;
    v.log_x_lo = v.log_x_hi = kNegInf;
    return v;
  } else {
    Eigen::Index k = 1;
    while (y[k] >= lo) ++k;
    v.log_x_hi = crossing(slf, k - 1, k, lo);
  }

  // Lower end: first x with ln L <= hi.
  if (y[0] <= hi) {
    v.log_x_lo = kNegInf;
    v.extends_below_curve = true;
  } else if (y[n - 1] > hi) {
    v.log_volume = kNegInf;
    v.log_x_lo = v.log_x_hi = 0.0;
    return v;
  } else {
    Eigen::Index k = 1;
    while (y[k] > hi) ++k;
    v.log_x_lo = crossing(slf, k - 1, k, hi);
  }

  v.log_volume = v.log_x_hi > v.log_x_lo ? log_diff_exp(v.log_x_hi, v.log_x_lo) : kNegInf;
  return v;
}

}  // namespace ccdfx
