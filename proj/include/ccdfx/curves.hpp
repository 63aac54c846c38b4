#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ccdfx {

/// Raised when an estimator or quadrature cannot produce a trustworthy
/// result (NaN likelihoods, truncated curves, inconsistent moments).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorted likelihood function L(x): log-likelihood against prior mass x,
/// stored as (ln x, ln L) with ln x strictly increasing and ln L
/// non-increasing. x is kept in log form because posterior mass in high
/// dimension lives at x far below the smallest normal double.
class SlfCurve {
 public:
  SlfCurve(Eigen::ArrayXd log_x, Eigen::ArrayXd log_l,
           std::optional<double> log_l_sup = std::nullopt);

  static SlfCurve from_x(const Eigen::ArrayXd& x, Eigen::ArrayXd log_l,
                         std::optional<double> log_l_sup = std::nullopt);

  Eigen::Index size() const { return log_x_.size(); }
  const Eigen::ArrayXd& log_x() const { return log_x_; }
  const Eigen::ArrayXd& log_l() const { return log_l_; }
  Eigen::ArrayXd x() const { return log_x_.exp(); }
  std::optional<double> log_l_sup() const { return log_l_sup_; }

  /// ln L at ln x by linear interpolation in (ln x, ln L). Throws outside
  /// the tabulated range.
  double log_l_at(double log_x) const;

  /// As log_l_at, but flat beyond the ends: ln L(x_first) on (0, x_first)
  /// and ln L(x_last) on (x_last, 1]. This is the convention every
  /// quadrature in the library uses for the untabulated panels.
  double log_l_at_extended(double log_x) const;

  /// Copy with every ln L (and ln l_sup) shifted by c.
  SlfCurve shifted(double c) const;

 private:
  Eigen::ArrayXd log_x_;
  Eigen::ArrayXd log_l_;
  std::optional<double> log_l_sup_;
};

/// Complementary CDF X(l) of the likelihood under the prior, stored as
/// (ln l, ln X) with ln l strictly increasing and ln X non-increasing.
class CcdfCurve {
 public:
  CcdfCurve(Eigen::ArrayXd log_l, Eigen::ArrayXd log_x);

  Eigen::Index size() const { return log_l_.size(); }
  const Eigen::ArrayXd& log_l() const { return log_l_; }
  const Eigen::ArrayXd& log_x() const { return log_x_; }
  Eigen::ArrayXd x() const { return log_x_.exp(); }

 private:
  Eigen::ArrayXd log_l_;
  Eigen::ArrayXd log_x_;
};

/// Exchange axes. Tied ln L values collapse to one CCDF point carrying the
/// largest x of the tie.
CcdfCurve to_ccdf(const SlfCurve& slf);
SlfCurve to_slf(const CcdfCurve& ccdf,
                std::optional<double> log_l_sup = std::nullopt);

struct PosteriorSummary {
  double log_z = 0.0;
  double mean_y = 0.0;
  double var_y = 0.0;
  double info_gain = 0.0;
  double sigma_p = 0.0;
  double d_e = 0.0;

  /// Fills the derived fields: G = E[Y] - ln z, sigma_p = sqrt(Var Y),
  /// d_e = 2 Var Y.
  static PosteriorSummary from_moments(double log_z, double mean_y,
                                       double var_y);
};

enum class DensityDomain { x_space, y_space };

std::string to_string(DensityDomain domain);

/// Tabulated log-density on a sorted abscissa.
struct DensityCurve {
  Eigen::ArrayXd abscissa;
  Eigen::ArrayXd log_density;
  DensityDomain domain = DensityDomain::x_space;

  /// Trapezoidal mass over the tabulated abscissa, accumulated in log space.
  double trapezoid_mass() const;

  /// ln density at `at` by linear interpolation of the log-density.
  double log_density_at(double at) const;
};

}  // namespace ccdfx
