#include "ccdfx/model.hpp"

#include <cmath>
#include <stdexcept>

#include "ccdfx/numerics.hpp"

namespace ccdfx {

namespace {

void check_sigma_d(double sigma, Eigen::Index d, const char* who) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument(std::string(who) + ": sigma must be positive");
  }
  if (d < 1) {
    throw std::invalid_argument(std::string(who) + ": dimension must be >= 1");
  }
}

Eigen::Index integer_param(const ModelParameters& params, std::string_view key) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw std::invalid_argument("missing model parameter '" + std::string(key) + "'");
  }
  const double v = it->second;
  if (v != std::floor(v) || v < 1.0) {
    throw std::invalid_argument("model parameter '" + std::string(key) +
                                "' must be a positive integer");
  }
  return static_cast<Eigen::Index>(v);
}

double real_param(const ModelParameters& params, std::string_view key) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw std::invalid_argument("missing model parameter '" + std::string(key) + "'");
  }
  return it->second;
}

}  // namespace

LikelihoodModel::LikelihoodModel(std::string name, Eigen::Index dimension,
                                 PriorTransform from_standard_normal,
                                 LogLikelihood log_likelihood,
                                 std::optional<double> log_likelihood_sup,
                                 Reference reference)
    : name_(std::move(name)),
      dimension_(dimension),
      transform_(std::move(from_standard_normal)),
      log_likelihood_(std::move(log_likelihood)),
      log_likelihood_sup_(log_likelihood_sup),
      reference_(reference) {
  if (dimension_ < 1) throw std::invalid_argument("LikelihoodModel: dimension must be >= 1");
  if (!transform_ || !log_likelihood_) {
    throw std::invalid_argument("LikelihoodModel: prior transform and likelihood are required");
  }
}

LikelihoodModel::Vector LikelihoodModel::sample_prior(Rng& rng) const {
  return transform_(standard_normal_vector(dimension_, rng));
}

Eigen::VectorXd unit_ball_from_standard_normal(const Eigen::VectorXd& u) {
  const double r2 = u.squaredNorm();
  if (r2 == 0.0) return Eigen::VectorXd::Zero(u.size());
  const double d = static_cast<double>(u.size());
  const double log_radius = log_gamma_p(0.5 * d, 0.5 * r2) / d;
  return u * (std::exp(log_radius) / std::sqrt(r2));
}

LikelihoodModel make_gaussian_ball_model(double sigma, Eigen::Index d) {
  check_sigma_d(sigma, d, "gaussian-ball");
  const double scale = 0.5 / (sigma * sigma);
  return LikelihoodModel(
      "gaussian-ball", d, unit_ball_from_standard_normal,
      [scale](const Eigen::VectorXd& theta) { return -scale * theta.squaredNorm(); },
      0.0);
}

LikelihoodModel make_gaussian_conjugate_model(double sigma, Eigen::Index d) {
  check_sigma_d(sigma, d, "gaussian-conjugate");
  const double scale = 0.5 / (sigma * sigma);
  return LikelihoodModel(
      "gaussian-conjugate", d, [](const Eigen::VectorXd& u) { return u; },
      [scale](const Eigen::VectorXd& theta) { return -scale * theta.squaredNorm(); },
      0.0,
      {conjugate_log_evidence(sigma, d), conjugate_information_gain(sigma, d)});
}

LikelihoodModel make_bimodal_model(double sep, double sigma, Eigen::Index d) {
  check_sigma_d(sigma, d, "bimodal");
  if (!(sep >= 0.0) || !std::isfinite(sep)) {
    throw std::invalid_argument("bimodal: sep must be non-negative");
  }
  const double scale = 0.5 / (sigma * sigma);
  const double offset = 0.5 * sep;
  return LikelihoodModel(
      "bimodal", d, unit_ball_from_standard_normal,
      [scale, offset](const Eigen::VectorXd& theta) {
        // |theta -+ c|^2 = |theta|^2 -+ 2 c theta_0 + c^2; nearest bump wins.
        const double r2 = theta.squaredNorm() - 2.0 * offset * std::abs(theta[0]) +
                          offset * offset;
        return -scale * std::max(r2, 0.0);
      },
      0.0);
}

LikelihoodModel make_constant_model(double log_value, Eigen::Index d) {
  if (!std::isfinite(log_value)) throw std::invalid_argument("constant: value must be finite");
  return LikelihoodModel(
      "constant", d, [](const Eigen::VectorXd& u) { return u; },
      [log_value](const Eigen::VectorXd&) { return log_value; }, log_value,
      {log_value, 0.0});
}

double conjugate_log_evidence(double sigma, Eigen::Index d) {
  check_sigma_d(sigma, d, "gaussian-conjugate");
  return -0.5 * static_cast<double>(d) * std::log1p(1.0 / (sigma * sigma));
}

double conjugate_information_gain(double sigma, Eigen::Index d) {
  check_sigma_d(sigma, d, "gaussian-conjugate");
  const double s = 1.0 / (sigma * sigma);
  return 0.5 * static_cast<double>(d) * (std::log1p(s) - s / (1.0 + s));
}

LikelihoodModel make_model(std::string_view name, const ModelParameters& params) {
  if (name == "gaussian-ball") {
    return make_gaussian_ball_model(real_param(params, "sigma"), integer_param(params, "d"));
  }
  if (name == "gaussian-conjugate") {
    return make_gaussian_conjugate_model(real_param(params, "sigma"),
                                         integer_param(params, "d"));
  }
  if (name == "bimodal") {
    return make_bimodal_model(real_param(params, "sep"), real_param(params, "sigma"),
                              integer_param(params, "d"));
  }
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

}  // namespace ccdfx
