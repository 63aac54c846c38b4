#include "ccdfx/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ccdfx/numerics.hpp"

namespace ccdfx {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Linear interpolation of ys over strictly increasing xs at `at`, which the
// caller guarantees lies inside [xs.front, xs.back].
double interpolate(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys,
                   double at) {
  const double* begin = xs.data();
  const double* end = begin + xs.size();
  const double* hi = std::lower_bound(begin, end, at);
  if (hi == begin) return ys[0];
  if (hi == end) return ys[xs.size() - 1];
  const Eigen::Index j = hi - begin;
  if (*hi == at) return ys[j];
  const double t = (at - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

}  // namespace

SlfCurve::SlfCurve(Eigen::ArrayXd log_x, Eigen::ArrayXd log_l,
                   std::optional<double> log_l_sup)
    : log_x_(std::move(log_x)), log_l_(std::move(log_l)), log_l_sup_(log_l_sup) {
  require(log_x_.size() == log_l_.size(), "SlfCurve: column length mismatch");
  require(log_x_.size() >= 2, "SlfCurve: needs at least 2 points");
  require(log_x_.allFinite(), "SlfCurve: ln x must be finite (x in (0, 1])");
  require(log_l_.allFinite(), "SlfCurve: ln L must be finite");
  require(log_x_.maxCoeff() <= 0.0, "SlfCurve: x must not exceed 1");
  for (Eigen::Index i = 1; i < log_x_.size(); ++i) {
    require(log_x_[i] > log_x_[i - 1], "SlfCurve: x must be strictly increasing");
    require(log_l_[i] <= log_l_[i - 1], "SlfCurve: ln L must be non-increasing in x");
  }
  if (log_l_sup_) {
    require(!std::isnan(*log_l_sup_), "SlfCurve: ln l_sup is NaN");
    require(log_l_[0] <= *log_l_sup_ + 1e-12 * std::max(1.0, std::abs(*log_l_sup_)),
            "SlfCurve: ln L exceeds the declared supremum");
  }
}

SlfCurve SlfCurve::from_x(const Eigen::ArrayXd& x, Eigen::ArrayXd log_l,
                          std::optional<double> log_l_sup) {
  require((x > 0.0).all(), "SlfCurve: x must be positive");
  return SlfCurve(x.log(), std::move(log_l), log_l_sup);
}

double SlfCurve::log_l_at(double log_x) const {
  if (std::isnan(log_x) || log_x < log_x_[0] || log_x > log_x_[size() - 1]) {
    throw std::out_of_range("SlfCurve: x outside the tabulated range");
  }
  return interpolate(log_x_, log_l_, log_x);
}

double SlfCurve::log_l_at_extended(double log_x) const {
  require(!std::isnan(log_x) && log_x <= 0.0, "SlfCurve: x must lie in (0, 1]");
  if (log_x <= log_x_[0]) return log_l_[0];
  if (log_x >= log_x_[size() - 1]) return log_l_[size() - 1];
  return interpolate(log_x_, log_l_, log_x);
}

SlfCurve SlfCurve::shifted(double c) const {
  std::optional<double> sup;
  if (log_l_sup_) sup = *log_l_sup_ + c;
  return SlfCurve(log_x_, log_l_ + c, sup);
}

CcdfCurve::CcdfCurve(Eigen::ArrayXd log_l, Eigen::ArrayXd log_x)
    : log_l_(std::move(log_l)), log_x_(std::move(log_x)) {
  require(log_l_.size() == log_x_.size(), "CcdfCurve: column length mismatch");
  require(log_l_.size() >= 1, "CcdfCurve: needs at least 1 point");
  require(log_l_.allFinite(), "CcdfCurve: ln l must be finite");
  require(!log_x_.isNaN().any(), "CcdfCurve: ln X is NaN");
  require(log_x_.maxCoeff() <= 0.0, "CcdfCurve: X must lie in [0, 1]");
  for (Eigen::Index i = 1; i < log_l_.size(); ++i) {
    require(log_l_[i] > log_l_[i - 1], "CcdfCurve: ln l must be strictly increasing");
    require(log_x_[i] <= log_x_[i - 1], "CcdfCurve: X must be non-increasing in l");
  }
}

CcdfCurve to_ccdf(const SlfCurve& slf) {
  // Walk from the largest x (smallest L) so each tie keeps its largest x.
  std::vector<double> log_l, log_x;
  for (Eigen::Index i = slf.size() - 1; i >= 0; --i) {
    const double l = slf.log_l()[i];
    if (!log_l.empty() && l == log_l.back()) continue;
    log_l.push_back(l);
    log_x.push_back(slf.log_x()[i]);
  }
  return CcdfCurve(Eigen::Map<Eigen::ArrayXd>(log_l.data(), log_l.size()),
                   Eigen::Map<Eigen::ArrayXd>(log_x.data(), log_x.size()));
}

SlfCurve to_slf(const CcdfCurve& ccdf, std::optional<double> log_l_sup) {
  std::vector<double> log_x, log_l;
  for (Eigen::Index i = ccdf.size() - 1; i >= 0; --i) {
    const double lx = ccdf.log_x()[i];
    if (!log_x.empty() && lx == log_x.back()) continue;  // plateau in X
    log_x.push_back(lx);
    log_l.push_back(ccdf.log_l()[i]);
  }
  return SlfCurve(Eigen::Map<Eigen::ArrayXd>(log_x.data(), log_x.size()),
                  Eigen::Map<Eigen::ArrayXd>(log_l.data(), log_l.size()),
                  log_l_sup);
}

PosteriorSummary PosteriorSummary::from_moments(double log_z, double mean_y,
                                                double var_y) {
  PosteriorSummary s;
  s.log_z = log_z;
  s.mean_y = mean_y;
  s.var_y = var_y;
  s.info_gain = mean_y - log_z;
  s.sigma_p = std::sqrt(var_y);
  s.d_e = 2.0 * var_y;
  return s;
}

std::string to_string(DensityDomain domain) {
  return domain == DensityDomain::x_space ? "x" : "y";
}

double DensityCurve::trapezoid_mass() const {
  LogSumExp acc;
  for (Eigen::Index i = 1; i < abscissa.size(); ++i) {
    const double width = abscissa[i] - abscissa[i - 1];
    if (!(width > 0.0)) continue;
    acc.add(std::log(width) + log_sum_exp(log_density[i - 1], log_density[i]) -
            std::numbers::ln2);
  }
  return std::exp(acc.value());
}

double DensityCurve::log_density_at(double at) const {
  if (abscissa.size() == 0 || at < abscissa[0] ||
      at > abscissa[abscissa.size() - 1]) {
    throw std::out_of_range("DensityCurve: abscissa outside the tabulated range");
  }
  return interpolate(abscissa, log_density, at);
}

}  // namespace ccdfx
