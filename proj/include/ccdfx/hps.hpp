#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "ccdfx/curves.hpp"

namespace ccdfx {

/// High-probability set A_eps = {x : |ln p_X(x) - G| <= eps} and the
/// Chebyshev-type bounds on its mass and prior volume.
struct HpsReport {
  double epsilon = 0.0;
  double center_g = 0.0;
  /// max(0, 1 - sigma_p^2 / eps^2).
  double prob_lower_bound = 0.0;
  /// ln of (1 - sigma_p^2/eps^2) e^-(G + eps); -inf when the bound is vacuous.
  double log_vol_lower = 0.0;
  /// ln of e^(-G + eps).
  double log_vol_upper = 0.0;
  std::pair<double, double> ln_px_interval;
  /// The same band expressed in ln L: [E[Y] - eps, E[Y] + eps].
  std::pair<double, double> ln_l_interval;
  /// True when ln l_sup (the likelihood mode) falls outside ln_l_interval.
  bool mode_excluded = false;
  /// eps < sigma_p, where the Chebyshev bound carries no information.
  bool chebyshev_vacuous = false;

  double vol_lower() const;
  double vol_upper() const;
};

HpsReport hps_report(const PosteriorSummary& summary, double epsilon, double log_l_sup);

/// Membership of x in A_eps, with ln L(x) interpolated on the curve. Throws
/// std::out_of_range when x lies outside the tabulated range.
bool hps_membership(double x, const SlfCurve& slf, double log_z, const PosteriorSummary& summary,
                    double epsilon);
bool hps_membership_log_x(double log_x, const SlfCurve& slf, double log_z,
                          const PosteriorSummary& summary, double epsilon);

/// Fraction of n posterior draws of x that land in A_eps.
double empirical_hps_probability(const SlfCurve& slf, double log_z, const PosteriorSummary& summary,
                                 double epsilon, std::size_t n, std::uint64_t seed);

struct HpsVolume {
  double log_volume = 0.0;
  double log_x_lo = 0.0;
  double log_x_hi = 0.0;
  /// The set reaches into the untabulated head (0, x_first); its measure
  /// there rests on the flat-extension convention.
  bool extends_below_curve = false;
  /// The set reaches past the last tabulated x.
  bool extends_above_curve = false;

  double volume() const;
};

/// Lebesgue measure of A_eps in x. ln p_X is monotone in x, so the set is a
/// single interval found by inverting the curve at the two band edges.
HpsVolume hps_volume_quadrature(const SlfCurve& slf, double log_z, const PosteriorSummary& summary,
                                double epsilon);

}  // namespace ccdfx
