#pragma once

#include <optional>

#include <Eigen/Dense>

#include "ccdfx/curves.hpp"

namespace ccdfx {

/// Uniform prior on the unit d-ball with ln L = -|theta|^2 / (2 sigma^2).
/// Every quantity below is closed form; tails of the likelihood outside
/// the ball are ignored, which is exact to double precision once sigma is
/// small against the ball radius.
class GaussianBallParams {
 public:
  GaussianBallParams(double sigma, Eigen::Index d);

  double sigma() const { return sigma_; }
  Eigen::Index d() const { return d_; }
  double half_d() const { return 0.5 * static_cast<double>(d_); }
  /// 2 sigma^2.
  double two_var() const { return 2.0 * sigma_ * sigma_; }

 private:
  double sigma_;
  Eigen::Index d_;
};

/// X(l) = min(1, (-2 sigma^2 ln l)^(d/2)) for ln l <= 0.
double ccdf_analytic(const GaussianBallParams& p, double log_l);

/// ln X(l); -inf at ln l = 0.
double log_ccdf_analytic(const GaussianBallParams& p, double log_l);

/// ln L(x) = -x^(2/d) / (2 sigma^2) for x in [0, 1].
double slf_analytic(const GaussianBallParams& p, double x);

/// ln L as a function of ln x; usable for x below the double range.
double slf_analytic_log_x(const GaussianBallParams& p, double log_x);

/// ln z = ln Gamma(d/2 + 1) + (d/2) ln(2 sigma^2).
double log_evidence_analytic(const GaussianBallParams& p);

/// ln of the integral of L over the unit ball itself, i.e. the closed form
/// plus ln P(d/2, 1/(2 sigma^2)). Differs from log_evidence_analytic once
/// sigma sqrt(d) approaches the ball radius.
double log_evidence_ball(const GaussianBallParams& p);

/// ln of the uniform prior density on the unit ball.
double log_prior_density_ball(Eigen::Index d);

/// Gaussian posterior ln p(theta) = -(d/2) ln(2 pi sigma^2) - |theta|^2/(2 sigma^2).
double log_posterior_pdf_theta_analytic(const GaussianBallParams& p,
                                        const Eigen::VectorXd& theta);

/// Posterior density of Y = ln L(X): e^y (-y)^(d/2 - 1) / Gamma(d/2), i.e.
/// -Y ~ Gamma(d/2, 1).
double posterior_y_pdf_analytic(const GaussianBallParams& p, double y);
double log_posterior_y_pdf_analytic(const GaussianBallParams& p, double y);

/// E[Y] = -d/2, Var[Y] = d/2, G = E[Y] - ln z, d_e = d.
PosteriorSummary summary_analytic(const GaussianBallParams& p);

/// Stirling form of the information gain, -(d/2) ln(sigma^2 d).
double info_gain_stirling(const GaussianBallParams& p);

/// ln L(x) tabulated on `n_points` x values geometric between x_min and 1.
/// The default x_min sits 30 nats below the evidence, so the untabulated
/// head panel carries < 1e-13 of the posterior mass.
SlfCurve analytic_slf_curve(const GaussianBallParams& p, Eigen::Index n_points = 10000,
                            std::optional<double> log_x_min = std::nullopt);

/// The same points as analytic_slf_curve with axes exchanged.
CcdfCurve analytic_ccdf_curve(const GaussianBallParams& p, Eigen::Index n_points = 10000,
                              std::optional<double> log_x_min = std::nullopt);

}  // namespace ccdfx
