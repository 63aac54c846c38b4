// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails. Oracles are computed here, independently of the code
// under test wherever the criterion allows it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ccdfx/analytic.hpp"
#include "ccdfx/cli/commands.hpp"
#include "ccdfx/estimator.hpp"
#include "ccdfx/functionals.hpp"
#include "ccdfx/hps.hpp"
#include "ccdfx/model.hpp"
#include "ccdfx/numerics.hpp"
#include "ccdfx/stats.hpp"

using namespace ccdfx;

namespace {

struct Result {
  bool passed;
  std::string detail;
};

std::string num(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// Collects every failed condition so the line shows all offenders.
struct Conditions {
  bool ok = true;
  std::vector<std::string> failures;
  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      failures.push_back(what);
    }
  }
  Result result(const std::string& summary) const {
    if (ok) return {true, summary};
    std::string joined;
    for (const auto& f : failures) joined += (joined.empty() ? "" : "; ") + f;
    return {false, joined};
  }
};

Result criterion_gamma_moments() {
  Conditions c;
  double worst = 0.0;
  for (Eigen::Index d : {2, 10, 100}) {
    const GaussianBallParams p(0.01, d);
    const double k = 0.5 * static_cast<double>(d);
    const double lo = -(k + 50.0 * std::sqrt(k) + 80.0);
    auto m = [&](int power) {
      return integrate_adaptive([&](double y) { return std::pow(y, power) * posterior_y_pdf_analytic(p, y); },
                                lo, 0.0, 1e-13)
          .value;
    };
    const double m0 = m(0), mean = m(1) / m0, var = m(2) / m0 - mean * mean;
    const double rel = std::max(std::abs(mean + k), std::abs(var - k)) / k;
    worst = std::max(worst, rel);
    c.require(rel <= 1e-6, "d=" + std::to_string(d) + " mean " + num(mean, 12) + " var " + num(var, 12));
  }
  return c.result("E[Y]=-d/2, Var[Y]=d/2 for d in {2,10,100}; worst rel err " + num(worst, 3));
}

Result criterion_evidence_oracle() {
  Conditions c;
  std::string notes;
  for (double sigma : {0.1, 0.01}) {
    for (Eigen::Index d : {2, 10, 100}) {
      const GaussianBallParams p(sigma, d);
      const double estimate = log_evidence(analytic_slf_curve(p, 10000));
      const double closed = log_evidence_analytic(p);
      // Independent check of the exact ball integral: closed form times the
      // chi-square probability of landing inside the unit ball.
      const double ball = closed + log_gamma_p(p.half_d(), 1.0 / p.two_var());
      if (closed - ball <= 1e-3) {
        c.require(std::abs(estimate - closed) <= 1e-3,
                  "sigma=" + num(sigma) + " d=" + std::to_string(d) + " |diff| " + num(std::abs(estimate - closed)));
      } else {
        c.require(std::abs(estimate - ball) <= 1e-3, "sigma=" + num(sigma) + " d=" + std::to_string(d) +
                                                         " vs ball integral " + num(std::abs(estimate - ball)));
        notes += " sigma=" + num(sigma) + ",d=" + std::to_string(d) + " closed form drops " +
                 num(closed - ball, 4) + " nats of out-of-ball mass, checked against the exact ball integral" +
                 " (|diff| " + num(std::abs(estimate - ball), 3) + ")";
      }
    }
  }
  return c.result("ln z from 1e4-point SLF within 1e-3 of the closed form;" + notes);
}

Result criterion_effective_dimension() {
  Conditions c;
  std::string got;
  for (Eigen::Index d : {2, 10, 100}) {
    const PosteriorSummary s = summarize(analytic_slf_curve(GaussianBallParams(0.01, d)));
    c.require(std::abs(s.d_e - static_cast<double>(d)) <= 0.01 * static_cast<double>(d),
              "d=" + std::to_string(d) + " d_e " + num(s.d_e));
    got += " " + num(s.d_e, 5);
  }
  return c.result("d_e for d=2,10,100:" + got);
}

Result criterion_stirling() {
  Conditions c;
  double previous = INFINITY, at100 = 0.0;
  for (Eigen::Index d : {10, 20, 50, 100, 200}) {
    const GaussianBallParams p(0.01, d);
    const double exact = summary_analytic(p).info_gain;
    const double stirling = -0.5 * static_cast<double>(d) * std::log(1e-4 * static_cast<double>(d));
    const double gap = std::abs(exact - stirling) / exact;
    c.require(gap < previous, "gap not decreasing at d=" + std::to_string(d));
    if (d == 100) at100 = gap;
    previous = gap;
  }
  c.require(at100 <= 0.02, "d=100 gap " + num(at100));
  return c.result("d=100 relative gap " + num(at100, 4) + " (<= 0.02), decreasing over d=10..200");
}

struct HpsCase {
  Eigen::Index d;
  double eps;
  std::string label;
};

std::vector<HpsCase> hps_cases() {
  std::vector<HpsCase> out;
  for (Eigen::Index d : {2, 10, 100}) {
    const double sp = std::sqrt(0.5 * static_cast<double>(d));
    out.push_back({d, 1.5 * sp, "1.5sigma_p"});
    out.push_back({d, 3.0 * sp, "3sigma_p"});
    out.push_back({d, std::sqrt(static_cast<double>(d)), "sqrt(d_e)"});
  }
  return out;
}

Result criterion_theorem_probability() {
  constexpr std::size_t n = 10000;
  Conditions c;
  double min3 = 1.0, min_sqrt = 1.0;
  for (const auto& hc : hps_cases()) {
    const GaussianBallParams p(0.01, hc.d);
    const PosteriorSummary s = summary_analytic(p);
    const SlfCurve slf = analytic_slf_curve(p);
    const double bound = std::max(0.0, 1.0 - s.var_y / (hc.eps * hc.eps));
    const double prob = empirical_hps_probability(slf, s.log_z, s, hc.eps, n, 11);
    const double floor = bound - 3.0 * std::sqrt(bound * (1.0 - bound) / n);
    c.require(prob >= floor, "d=" + std::to_string(hc.d) + " eps=" + hc.label + " prob " + num(prob));
    if (hc.label == "3sigma_p") {
      min3 = std::min(min3, prob);
      c.require(prob >= 8.0 / 9.0, "d=" + std::to_string(hc.d) + " below 8/9 at 3sigma_p");
    }
    if (hc.label == "sqrt(d_e)") {
      min_sqrt = std::min(min_sqrt, prob);
      c.require(prob >= 0.5, "d=" + std::to_string(hc.d) + " below 0.5 at sqrt(d_e)");
    }
  }
  return c.result("all 9 cases above Chebyshev - 3 SE; min Pr at 3sigma_p " + num(min3, 4) +
                  ", at sqrt(d_e) " + num(min_sqrt, 4));
}

Result criterion_theorem_volume() {
  Conditions c;
  for (const auto& hc : hps_cases()) {
    const GaussianBallParams p(0.01, hc.d);
    const PosteriorSummary s = summary_analytic(p);
    const HpsVolume v = hps_volume_quadrature(analytic_slf_curve(p), s.log_z, s, hc.eps);
    const double cheb = 1.0 - s.var_y / (hc.eps * hc.eps);
    const double log_lower = cheb > 0.0 ? std::log(cheb) - (s.info_gain + hc.eps) : -INFINITY;
    const double log_upper = -s.info_gain + hc.eps;
    c.require(v.log_volume >= log_lower && v.log_volume <= log_upper + 1e-6,
              "d=" + std::to_string(hc.d) + " eps=" + hc.label + " ln Vol " + num(v.log_volume) + " not in [" +
                  num(log_lower) + ", " + num(log_upper) + "]");
  }
  return c.result("ln Vol inside [ln(1-s^2/e^2)-(G+e), -G+e] for all 9 cases");
}

Result criterion_mode_exclusion() {
  Conditions c;
  const PosteriorSummary s = summary_analytic(GaussianBallParams(0.01, 100));
  const HpsReport h = hps_report(s, 3.0 * s.sigma_p, 0.0);
  c.require(h.mode_excluded, "mode not excluded at d=100");
  c.require(std::abs(h.ln_l_interval.first - (-50.0 - 3.0 * std::sqrt(50.0))) < 1e-9 &&
                std::abs(h.ln_l_interval.second - (-50.0 + 3.0 * std::sqrt(50.0))) < 1e-9,
            "interval mismatch");
  int transition = -1;
  for (Eigen::Index d = 1; d <= 60; ++d) {
    const PosteriorSummary sd = summary_analytic(GaussianBallParams(0.01, d));
    const bool excluded = hps_report(sd, 3.0 * sd.sigma_p, 0.0).mode_excluded;
    if (excluded && transition < 0) transition = static_cast<int>(d);
    if (transition > 0) c.require(excluded, "mode re-included at d=" + std::to_string(d));
  }
  c.require(transition == 19, "transition at d=" + std::to_string(transition));
  return c.result("d=100 ln L interval [" + num(h.ln_l_interval.first, 4) + ", " + num(h.ln_l_interval.second, 4) +
                  "] excludes 0; false->true at d=" + std::to_string(transition));
}

struct Bootstrap {
  SampleMoments log_z, info_gain, d_e;
};

Bootstrap run_pipeline(const LikelihoodModel& model, std::size_t n_seeds, Eigen::Index n_per_level) {
  std::vector<double> z, g, de;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    SubsetConfig cfg;
    cfg.p0 = 0.1;
    cfg.n_per_level = n_per_level;
    cfg.seed = seed;
    const PosteriorSummary s = summarize(subset_ccdf(model, cfg).slf);
    z.push_back(s.log_z);
    g.push_back(s.info_gain);
    de.push_back(s.d_e);
  }
  return {sample_moments(z), sample_moments(g), sample_moments(de)};
}

Result criterion_estimator_end_to_end() {
  const Bootstrap b = run_pipeline(make_gaussian_ball_model(0.01, 10), 10, 2000);
  const double want = std::lgamma(6.0) + 5.0 * std::log(2e-4);
  Conditions c;
  c.require(std::abs(b.log_z.mean - want) <= 3.0 * b.log_z.standard_error(), "ln z off");
  c.require(std::abs(b.d_e.mean - 10.0) <= 1.0, "d_e off");
  return c.result("ln z " + num(b.log_z.mean) + " +- " + num(b.log_z.standard_error(), 3) + " vs " + num(want) +
                  "; d_e " + num(b.d_e.mean, 4) + " vs 10");
}

Result criterion_conjugate() {
  const Bootstrap b = run_pipeline(make_gaussian_conjugate_model(1.0, 4), 10, 2000);
  const double want_z = -2.0 * std::numbers::ln2, want_g = 2.0 * std::numbers::ln2 - 1.0;
  Conditions c;
  c.require(std::abs(b.log_z.mean - want_z) <= 3.0 * b.log_z.standard_error(), "ln z off");
  c.require(std::abs(b.info_gain.mean - want_g) <= 3.0 * b.info_gain.standard_error(), "G off");
  return c.result("ln z " + num(b.log_z.mean) + " +- " + num(b.log_z.standard_error(), 3) + " vs " + num(want_z) +
                  "; G " + num(b.info_gain.mean) + " +- " + num(b.info_gain.standard_error(), 3) + " vs " +
                  num(want_g));
}

// Midpoint rule on a 2000 x 2000 grid over [-1, 1]^2, cells kept when the
// centre lies in the unit disk; prior density 1/pi.
struct GridOracle {
  double log_z, d_e;
};

GridOracle bimodal_grid(double sep, double sigma) {
  constexpr int n = 2000;
  const double h = 2.0 / n, c = 0.5 * sep, inv = 0.5 / (sigma * sigma);
  const double cell_mass = h * h / std::numbers::pi;
  double z = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double y = -1.0 + (j + 0.5) * h;
      if (x * x + y * y > 1.0) continue;
      const double r2 = std::min((x - c) * (x - c), (x + c) * (x + c)) + y * y;
      const double log_l = -inv * r2;
      const double w = std::exp(log_l) * cell_mass;
      z += w;
      s1 += w * log_l;
      s2 += w * log_l * log_l;
    }
  }
  const double mean = s1 / z;
  return {std::log(z), 2.0 * (s2 / z - mean * mean)};
}

Result criterion_bimodal() {
  const GridOracle grid = bimodal_grid(1.0, 0.05);
  const Bootstrap b = run_pipeline(make_bimodal_model(1.0, 0.05, 2), 10, 2000);
  Conditions c;
  c.require(std::abs(b.log_z.mean - grid.log_z) <= 3.0 * b.log_z.standard_error(), "ln z off");
  c.require(std::abs(b.d_e.mean - grid.d_e) <= 0.05 * grid.d_e, "d_e off");
  return c.result("ln z " + num(b.log_z.mean) + " +- " + num(b.log_z.standard_error(), 3) + " vs grid " +
                  num(grid.log_z) + "; d_e " + num(b.d_e.mean, 4) + " vs grid " + num(grid.d_e, 4));
}

Result criterion_distribution_identity() {
  constexpr std::size_t n = 10000;
  Conditions c;
  std::string stats;
  for (Eigen::Index d : {2, 10, 100}) {
    const GaussianBallParams p(0.01, d);
    const LikelihoodModel model = make_gaussian_ball_model(0.01, d);
    Rng prior_rng = make_rng(100 + d, 0), u_rng = make_rng(200 + d, 0);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = model.log_likelihood(model.sample_prior(prior_rng));
      b[i] = slf_analytic(p, uniform_open(u_rng));
    }
    const double dist = ks_distance_two_sample(a, b);
    // Asymptotic two-sample critical value at alpha = 1e-3.
    const double crit = std::sqrt(-0.5 * std::log(1e-3 / 2.0)) * std::sqrt(2.0 / n);
    c.require(dist <= crit, "d=" + std::to_string(d) + " KS " + num(dist));
    stats += " d=" + std::to_string(d) + ":" + num(dist, 3);
  }
  return c.result("two-sample KS distance below " +
                  num(std::sqrt(-0.5 * std::log(5e-4)) * std::sqrt(2.0 / n), 4) + " at 1e-3;" + stats);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Result criterion_sweep_phenomenology() {
  const auto dir = std::filesystem::temp_directory_path() / "ccdfx_acceptance_sweep";
  std::filesystem::remove_all(dir);
  cli::SweepConfig cfg;
  cfg.base.estimator.kind = cli::EstimatorKind::analytic;
  cfg.base.params = {{"sigma", 0.01}, {"d", 10.0}};
  cfg.base.epsilon_rule = cli::EpsilonRule::parse("sqrt-de");
  cfg.base.output_dir = dir.string();
  cfg.variable = "d";
  for (int d = 10; d <= 200; d += 10) cfg.values.push_back(d);
  std::ostringstream log;
  Conditions c;
  const int code = cli::cmd_sweep(cfg, log);
  c.require(code == 0, "cmd_sweep exit " + std::to_string(code));
  if (code != 0) return c.result("");

  const auto rows = read_csv(dir / "sweep.csv");
  c.require(rows.size() == cfg.values.size() + 1, "row count");
  c.require(rows.front() == std::vector<std::string>{"d", "log_z", "G", "sigma_p", "d_e", "cov", "hps_lo",
                                                      "hps_hi", "mode_excluded", "vol_upper"},
            "header");
  std::vector<double> d, g, cov, vol;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    d.push_back(std::stod(rows[i][0]));
    g.push_back(std::stod(rows[i][2]));
    cov.push_back(std::stod(rows[i][5]));
    vol.push_back(std::stod(rows[i][9]));
  }
  double dm = 0, gm = 0;
  for (std::size_t i = 0; i < d.size(); ++i) dm += d[i], gm += g[i];
  dm /= d.size();
  gm /= g.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < d.size(); ++i) sxy += (d[i] - dm) * (g[i] - gm), sxx += (d[i] - dm) * (d[i] - dm);
  const double slope = sxy / sxx;
  // d/dd of the Stirling form -(d/2) ln(sigma^2 d) at the sweep midpoint.
  const double stirling_slope = -0.5 * std::log(1e-4 * dm) - 0.5;
  c.require(std::abs(slope - stirling_slope) <= 0.05 * std::abs(stirling_slope), "slope " + num(slope));
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double fit = gm + slope * (d[i] - dm);
    ss_res += (g[i] - fit) * (g[i] - fit);
    ss_tot += (g[i] - gm) * (g[i] - gm);
  }
  for (std::size_t i = 1; i < d.size(); ++i) {
    c.require(cov[i] < cov[i - 1], "cov not decreasing at d=" + num(d[i]));
    c.require(vol[i] < vol[i - 1], "vol_upper not decreasing at d=" + num(d[i]));
  }
  std::filesystem::remove_all(dir);
  return c.result("LS slope " + num(slope, 4) + " vs Stirling derivative " + num(stirling_slope, 4) +
                  " (R^2 " + num(1.0 - ss_res / ss_tot, 6) + "); cov and vol_upper strictly decreasing");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"1 gamma-moment identity", criterion_gamma_moments},
      {"2 evidence oracle", criterion_evidence_oracle},
      {"3 effective dimension recovery", criterion_effective_dimension},
      {"4 Stirling consistency", criterion_stirling},
      {"5 HPS probability bound", criterion_theorem_probability},
      {"6 HPS volume bounds", criterion_theorem_volume},
      {"7 mode exclusion", criterion_mode_exclusion},
      {"8 estimator end-to-end", criterion_estimator_end_to_end},
      {"9 conjugate cross-oracle", criterion_conjugate},
      {"10 bimodal grid oracle", criterion_bimodal},
      {"11 distributional identity", criterion_distribution_identity},
      {"12 sweep phenomenology", criterion_sweep_phenomenology},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{false, ""};
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", name.c_str(), r.detail.c_str(), secs);
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
