#include "ccdfx/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ccdfx/numerics.hpp"

namespace ccdfx {

GaussianBallParams::GaussianBallParams(double sigma, Eigen::Index d) : sigma_(sigma), d_(d) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("GaussianBallParams: sigma must be positive");
  }
  if (d < 1) throw std::invalid_argument("GaussianBallParams: d must be >= 1");
}

double log_ccdf_analytic(const GaussianBallParams& p, double log_l) {
  if (!(log_l <= 0.0)) {
    throw std::domain_error("ccdf_analytic: ln l above the likelihood supremum 0");
  }
  if (log_l == 0.0) return kNegInf;
  const double radius2 = -p.two_var() * log_l;  // |theta|^2 on the level set
  if (radius2 >= 1.0) return 0.0;
  return p.half_d() * std::log(radius2);
}

double ccdf_analytic(const GaussianBallParams& p, double log_l) {
  return std::exp(log_ccdf_analytic(p, log_l));
}

double slf_analytic_log_x(const GaussianBallParams& p, double log_x) {
  if (!(log_x <= 0.0)) throw std::domain_error("slf_analytic: x must lie in [0, 1]");
  return -std::exp(log_x / p.half_d()) / p.two_var();
}

double slf_analytic(const GaussianBallParams& p, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("slf_analytic: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  return slf_analytic_log_x(p, std::log(x));
}

double log_evidence_analytic(const GaussianBallParams& p) {
  return log_gamma(p.half_d() + 1.0) + p.half_d() * std::log(p.two_var());
}

double log_evidence_ball(const GaussianBallParams& p) {
  return log_evidence_analytic(p) + log_gamma_p(p.half_d(), 1.0 / p.two_var());
}

double log_prior_density_ball(Eigen::Index d) {
  const double h = 0.5 * static_cast<double>(d);
  return log_gamma(h + 1.0) - h * std::log(std::numbers::pi);
}

double log_posterior_pdf_theta_analytic(const GaussianBallParams& p,
                                        const Eigen::VectorXd& theta) {
  if (theta.size() != p.d()) {
    throw std::invalid_argument("log_posterior_pdf_theta: dimension mismatch");
  }
  const double r2 = theta.squaredNorm();
  if (r2 > 1.0) throw std::domain_error("log_posterior_pdf_theta: theta outside the unit ball");
  return -p.half_d() * std::log(std::numbers::pi * p.two_var()) - r2 / p.two_var();
}

double log_posterior_y_pdf_analytic(const GaussianBallParams& p, double y) {
  if (!(y <= 0.0)) throw std::domain_error("posterior_y_pdf: y must be <= 0");
  const double shape = p.half_d();
  if (y == 0.0) {
    if (shape < 1.0) return std::numeric_limits<double>::infinity();
    return shape == 1.0 ? 0.0 : kNegInf;
  }
  return y + (shape - 1.0) * std::log(-y) - log_gamma(shape);
}

double posterior_y_pdf_analytic(const GaussianBallParams& p, double y) {
  return std::exp(log_posterior_y_pdf_analytic(p, y));
}

PosteriorSummary summary_analytic(const GaussianBallParams& p) {
  return PosteriorSummary::from_moments(log_evidence_analytic(p), -p.half_d(), p.half_d());
}

double info_gain_stirling(const GaussianBallParams& p) {
  return -p.half_d() * std::log(p.sigma() * p.sigma() * static_cast<double>(p.d()));
}

SlfCurve analytic_slf_curve(const GaussianBallParams& p, Eigen::Index n_points,
                            std::optional<double> log_x_min) {
  if (n_points < 2) throw std::invalid_argument("analytic_slf_curve: need >= 2 points");
  const double lo = log_x_min.value_or(std::min(log_evidence_analytic(p), 0.0) - 30.0);
  if (!(lo < 0.0)) throw std::invalid_argument("analytic_slf_curve: x_min must be below 1");
  Eigen::ArrayXd log_x = Eigen::ArrayXd::LinSpaced(n_points, lo, 0.0);
  log_x[n_points - 1] = 0.0;
  Eigen::ArrayXd log_l = log_x.unaryExpr([&](double lx) { return slf_analytic_log_x(p, lx); });
  return SlfCurve(std::move(log_x), std::move(log_l), 0.0);
}

CcdfCurve analytic_ccdf_curve(const GaussianBallParams& p, Eigen::Index n_points,
                              std::optional<double> log_x_min) {
  return to_ccdf(analytic_slf_curve(p, n_points, log_x_min));
}

}  // namespace ccdfx
