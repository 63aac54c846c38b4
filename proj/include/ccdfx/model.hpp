#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ccdfx/random.hpp"

namespace ccdfx {

/// One inference problem: a prior over R^d and a log-likelihood.
///
/// The prior is given as a map from standard-normal space, theta = T(u) with
/// u ~ N(0, I_d). Sampling the prior draws u and applies T; the subset
/// estimator runs its conditional chains on u, where every prior is the same
/// isotropic Gaussian. Models are immutable once built and can be shared
/// across threads.
class LikelihoodModel {
 public:
  using Vector = Eigen::VectorXd;
  using PriorTransform = std::function<Vector(const Vector&)>;
  using LogLikelihood = std::function<double(const Vector&)>;

  /// Closed-form values some models know about themselves.
  struct Reference {
    std::optional<double> log_evidence;
    std::optional<double> info_gain;
  };

  LikelihoodModel(std::string name, Eigen::Index dimension,
                  PriorTransform from_standard_normal,
                  LogLikelihood log_likelihood,
                  std::optional<double> log_likelihood_sup = std::nullopt,
                  Reference reference = {});

  const std::string& name() const { return name_; }
  Eigen::Index dimension() const { return dimension_; }
  std::optional<double> log_likelihood_sup() const { return log_likelihood_sup_; }
  const Reference& reference() const { return reference_; }

  Vector sample_prior(Rng& rng) const;
  Vector to_theta(const Vector& u) const { return transform_(u); }
  double log_likelihood(const Vector& theta) const { return log_likelihood_(theta); }
  double log_likelihood_standard(const Vector& u) const {
    return log_likelihood_(transform_(u));
  }

 private:
  std::string name_;
  Eigen::Index dimension_;
  PriorTransform transform_;
  LogLikelihood log_likelihood_;
  std::optional<double> log_likelihood_sup_;
  Reference reference_;
};

/// Uniform point in the unit d-ball from a standard-normal vector: the
/// direction u/|u| and the radius P(d/2, |u|^2/2)^(1/d), where P(d/2, .) is
/// the chi-square CDF. The radius factor is a U(0,1) variate independent of
/// the direction.
Eigen::VectorXd unit_ball_from_standard_normal(const Eigen::VectorXd& u);

/// Uniform prior on the unit d-ball, ln L = -|theta|^2 / (2 sigma^2).
LikelihoodModel make_gaussian_ball_model(double sigma, Eigen::Index d);

/// Standard-normal prior with the same likelihood; evidence and information
/// gain are known in closed form and stored in reference().
LikelihoodModel make_gaussian_conjugate_model(double sigma, Eigen::Index d);

/// Uniform-ball prior; ln L is the larger of two Gaussian bumps centred at
/// +-(sep/2) e_1. sep = 0 reproduces the gaussian-ball model.
LikelihoodModel make_bimodal_model(double sep, double sigma, Eigen::Index d);

/// Flat likelihood ln L = c under a standard-normal prior.
LikelihoodModel make_constant_model(double log_value, Eigen::Index d);

/// ln z = -(d/2) ln(1 + sigma^-2) for the conjugate model.
double conjugate_log_evidence(double sigma, Eigen::Index d);

/// KL(posterior || prior) for N(0, I) -> N(0, (1 + sigma^-2)^-1 I):
/// (d/2) [ln(1 + s) + 1/(1 + s) - 1] with s = sigma^-2.
double conjugate_information_gain(double sigma, Eigen::Index d);

using ModelParameters = std::map<std::string, double, std::less<>>;

/// Zoo lookup: "gaussian-ball" {sigma, d}, "gaussian-conjugate" {sigma, d},
/// "bimodal" {sep, sigma, d}.
LikelihoodModel make_model(std::string_view name, const ModelParameters& params);

}  // namespace ccdfx
