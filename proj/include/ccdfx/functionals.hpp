#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ccdfx/curves.hpp"
#include "ccdfx/numerics.hpp"

namespace ccdfx {

enum class QuadratureMethod { trapezoid_x, rectangle_left };

struct QuadratureOptions {
  QuadratureMethod method = QuadratureMethod::trapezoid_x;
  Eigen::Index min_points = 2;
  /// Largest admissible head-panel truncation bound, relative to z.
  double max_truncation_fraction = 1e-3;
};

/// ln of per-node quadrature weights for an SLF on [0, 1]. The head panel
/// (0, x_first) and the tail panel (x_last, 1] are flat extensions of the
/// end values, so sum(weights) == 1 for every curve.
Eigen::ArrayXd log_node_weights(const SlfCurve& slf, const QuadratureOptions& opts = {});

struct EvidenceEstimate {
  double log_z = 0.0;
  /// ln of the largest mass the head panel could be missing,
  /// x_first (l_sup - L(x_first)); -inf when l_sup is undeclared or reached.
  double log_truncation_bound = kNegInf;
};

/// ln z = ln of the integral of L over [0, 1], in log space throughout.
/// Throws EstimationError when the head truncation bound exceeds
/// max_truncation_fraction of z.
EvidenceEstimate evidence_estimate(const SlfCurve& slf, const QuadratureOptions& opts = {});

double log_evidence(const SlfCurve& slf, const QuadratureOptions& opts = {});

/// ln z from the other form, the integral of X(l) over l in [0, l_sup],
/// accumulated panel by panel over the CCDF points.
double log_evidence_from_ccdf(const CcdfCurve& ccdf);

struct YMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Posterior mean and variance of Y = ln L(X), X ~ p_X = L/z. Variance is
/// the shifted two-pass sum.
YMoments posterior_moments_y(const SlfCurve& slf, double log_z, const QuadratureOptions& opts = {});

PosteriorSummary summarize(const SlfCurve& slf, const QuadratureOptions& opts = {});

/// ln p_X(x) = ln L(x) - ln z on the curve nodes.
DensityCurve posterior_pdf_x(const SlfCurve& slf, double log_z);

struct YDensity {
  DensityCurve density;
  /// ln l of nodes dropped because X is flat there.
  std::vector<double> dropped_log_l;
};

/// p_Y(y) = e^y |dX/dy| / z with dX/dy = X d(ln X)/dy taken by centred
/// differences of (y, ln X) over +-half_width neighbours.
YDensity posterior_pdf_y(const CcdfCurve& ccdf, double log_z, Eigen::Index half_width = 1);

/// Inverse-CDF draws of ln x from the trapezoid posterior mass. Each draw is
/// uniform in x within its panel.
std::vector<double> sample_posterior_log_x(const SlfCurve& slf, double log_z, std::size_t n,
                                           std::uint64_t seed);

/// As sample_posterior_log_x, exponentiated.
std::vector<double> sample_posterior_x(const SlfCurve& slf, double log_z, std::size_t n,
                                       std::uint64_t seed);

}  // namespace ccdfx
