#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ccdfx {

/// Two-sided one-sample Kolmogorov-Smirnov distance to U(0, 1).
double ks_distance_uniform(std::vector<double> samples);

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic critical value of the one-sample KS distance at level alpha.
double ks_critical_one_sample(double alpha, std::size_t n);

/// Asymptotic critical value of the two-sample KS distance at level alpha.
double ks_critical_two_sample(double alpha, std::size_t n, std::size_t m);

/// Dvoretzky-Kiefer-Wolfowitz half-width: sup|F_n - F| <= eps w.p. 1 - alpha.
double dkw_epsilon(std::size_t n, double alpha);

double binomial_standard_error(double p, std::size_t n);

struct SampleMoments {
  double mean = 0.0;
  double stddev = 0.0;  // unbiased (n - 1) normalisation
  std::size_t count = 0;
  double standard_error() const;
};

SampleMoments sample_moments(std::span<const double> values);

}  // namespace ccdfx
