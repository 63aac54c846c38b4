#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ccdfx/analytic.hpp"
#include "ccdfx/cli/commands.hpp"
#include "ccdfx/cli/output.hpp"
#include "ccdfx/stats.hpp"

namespace ccdfx::cli {

using nlohmann::json;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<Outcome()> run;
};

// Accumulates a verdict and a one-line note of the worst offender.
class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && passed_) {
      passed_ = false;
      detail_ = what;
    }
  }
  void note(const std::string& what) {
    if (passed_) detail_ = what;
  }
  Outcome outcome() const { return {passed_, detail_}; }

 private:
  bool passed_ = true;
  std::string detail_;
};

std::string fmt(double v) { return format_double(v); }

// ln of the integral of L over the ball, computed as the integral over
// t = ln x of exp(t + ln L(e^t)), centred on the integrand's peak.
double quadrature_log_evidence(const GaussianBallParams& p) {
  const double half_d = p.half_d();
  auto g = [&](double t) { return t + slf_analytic_log_x(p, t); };
  const double peak = std::min(0.0, half_d * std::log(2.0 * half_d * p.sigma() * p.sigma()));
  const double g_peak = g(peak);
  const double lo = peak - 80.0 - 10.0 * half_d;
  const double hi = std::min(0.0, peak + 20.0 + 10.0 * half_d);
  const auto r = integrate_adaptive([&](double t) { return std::exp(g(t) - g_peak); }, lo, hi, 1e-13);
  return g_peak + std::log(r.value);
}

Outcome check_evidence_oracle() {
  Verdict v;
  double worst = 0.0;
  for (double sigma : {0.1, 0.01}) {
    for (Eigen::Index d : {1, 2, 10}) {
      const GaussianBallParams p(sigma, d);
      const double closed = log_evidence_analytic(p);
      const double quad = quadrature_log_evidence(p);
      const double gap = std::abs(closed - quad) / std::abs(quad);
      worst = std::max(worst, gap);
      v.expect(gap <= 1e-8, "sigma=" + fmt(sigma) + " d=" + std::to_string(d) + " closed " + fmt(closed) +
                                " vs quadrature " + fmt(quad));
    }
  }
  v.note("worst relative gap " + fmt(worst));
  return v.outcome();
}

Outcome check_evidence_two_forms() {
  Verdict v;
  double worst = 0.0;
  for (double sigma : {0.1, 0.01}) {
    for (Eigen::Index d : {2, 10, 100}) {
      const SlfCurve slf = analytic_slf_curve(GaussianBallParams(sigma, d));
      const double gap = std::abs(log_evidence(slf) - log_evidence_from_ccdf(to_ccdf(slf)));
      worst = std::max(worst, gap);
      v.expect(gap <= 1e-9, "x-form and l-form disagree at sigma=" + fmt(sigma) + " d=" + std::to_string(d));
    }
  }
  v.note("worst gap " + fmt(worst));
  return v.outcome();
}

Outcome check_gamma_moments() {
  Verdict v;
  for (Eigen::Index d : {2, 10, 100}) {
    const GaussianBallParams p(0.01, d);
    const double k = p.half_d();
    const double lo = -(k + 40.0 * std::sqrt(k) + 60.0);
    auto moment = [&](int power) {
      return integrate_adaptive(
                 [&](double y) { return std::pow(y, power) * posterior_y_pdf_analytic(p, y); }, lo, 0.0, 1e-13)
          .value;
    };
    const double mass = moment(0);
    const double mean = moment(1) / mass;
    const double var = moment(2) / mass - mean * mean;
    v.expect(std::abs(mean + k) <= 1e-6 * k && std::abs(var - k) <= 1e-6 * k,
             "d=" + std::to_string(d) + " mean " + fmt(mean) + " var " + fmt(var));
  }
  v.note("E[Y] = -d/2 and Var[Y] = d/2 for d in {2, 10, 100}");
  return v.outcome();
}

Outcome check_slf_evidence() {
  Verdict v;
  double worst = 0.0;
  for (double sigma : {0.1, 0.01}) {
    for (Eigen::Index d : {2, 10, 100}) {
      // Where the ball drops a visible share of the Gaussian mass the closed
      // form no longer describes the curve; the exact ball integral does.
      const GaussianBallParams p(sigma, d);
      const double closed = log_evidence_analytic(p);
      const double ball = log_evidence_ball(p);
      const double oracle = closed - ball <= 1e-3 ? closed : ball;
      const double gap = std::abs(log_evidence(analytic_slf_curve(p)) - oracle);
      worst = std::max(worst, gap);
      v.expect(gap <= 1e-3, "sigma=" + fmt(sigma) + " d=" + std::to_string(d) + " gap " + fmt(gap));
    }
  }
  v.note("worst absolute ln z gap " + fmt(worst));
  return v.outcome();
}

Outcome check_de_recovery() {
  Verdict v;
  for (Eigen::Index d : {2, 10, 100}) {
    const PosteriorSummary s = summarize(analytic_slf_curve(GaussianBallParams(0.01, d)));
    const double dd = static_cast<double>(d);
    v.expect(std::abs(s.d_e - dd) <= 0.01 * dd, "d=" + std::to_string(d) + " d_e " + fmt(s.d_e));
  }
  v.note("d_e within 1% of d");
  return v.outcome();
}

Outcome check_stirling() {
  Verdict v;
  double previous = std::numeric_limits<double>::infinity();
  for (Eigen::Index d : {10, 20, 50, 100, 200}) {
    const GaussianBallParams p(0.01, d);
    const double exact = summary_analytic(p).info_gain;
    const double gap = std::abs(exact - info_gain_stirling(p)) / std::abs(exact);
    v.expect(gap < previous, "relative gap not decreasing at d=" + std::to_string(d));
    if (d == 100) v.expect(gap <= 0.02, "d=100 relative gap " + fmt(gap));
    previous = gap;
  }
  v.note("d=200 relative gap " + fmt(previous));
  return v.outcome();
}

Outcome check_inverse_identity() {
  Verdict v;
  double worst = 0.0;
  for (Eigen::Index d : {1, 2, 10, 100}) {
    const GaussianBallParams p(0.01, d);
    for (int i = 1; i < 100; ++i) {
      const double x = i / 100.0;
      const double back = ccdf_analytic(p, slf_analytic(p, x));
      worst = std::max(worst, std::abs(back - x));
    }
  }
  v.expect(worst <= 1e-10, "worst round-trip error " + fmt(worst));
  v.note("worst round-trip error " + fmt(worst));
  return v.outcome();
}

Outcome check_ks_identity() {
  constexpr std::size_t n = 10000;
  const GaussianBallParams p(0.01, 10);
  const LikelihoodModel model = make_gaussian_ball_model(0.01, 10);
  Rng prior_rng = make_rng(1, 0);
  Rng u_rng = make_rng(2, 0);
  std::vector<double> from_prior(n), from_slf(n);
  for (std::size_t i = 0; i < n; ++i) {
    from_prior[i] = model.log_likelihood(model.sample_prior(prior_rng));
    from_slf[i] = slf_analytic(p, uniform_open(u_rng));
  }
  const double dist = ks_distance_two_sample(from_prior, from_slf);
  const double crit = ks_critical_two_sample(1e-3, n, n);
  return {dist <= crit, "KS distance " + fmt(dist) + " vs critical " + fmt(crit)};
}

Outcome check_dkw_envelope() {
  constexpr Eigen::Index n = 100000;
  const GaussianBallParams p(0.1, 2);
  const EstimatedCurves est = mc_ccdf(make_gaussian_ball_model(0.1, 2), n, 0);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < est.ccdf.size(); ++i) {
    worst = std::max(worst, std::abs(std::exp(est.ccdf.log_x()[i]) - ccdf_analytic(p, est.ccdf.log_l()[i])));
  }
  const double bound = dkw_epsilon(n, 1e-3);
  return {worst <= bound, "max deviation " + fmt(worst) + " vs DKW " + fmt(bound)};
}

struct HpsCase {
  Eigen::Index d;
  double epsilon;
  PosteriorSummary summary;
  SlfCurve slf;
};

std::vector<HpsCase> hps_cases() {
  std::vector<HpsCase> cases;
  for (Eigen::Index d : {2, 10, 100}) {
    const GaussianBallParams p(0.01, d);
    const PosteriorSummary s = summary_analytic(p);
    const SlfCurve slf = analytic_slf_curve(p);
    for (double eps : {1.5 * s.sigma_p, 3.0 * s.sigma_p, std::sqrt(s.d_e)}) cases.push_back({d, eps, s, slf});
  }
  return cases;
}

Outcome check_theorem_probability() {
  constexpr std::size_t n = 10000;
  Verdict v;
  double slack_min = std::numeric_limits<double>::infinity();
  for (const auto& c : hps_cases()) {
    const HpsReport h = hps_report(c.summary, c.epsilon, 0.0);
    const double prob = empirical_hps_probability(c.slf, c.summary.log_z, c.summary, c.epsilon, n, 7);
    const double floor = h.prob_lower_bound - 3.0 * binomial_standard_error(h.prob_lower_bound, n);
    slack_min = std::min(slack_min, prob - floor);
    v.expect(prob >= floor, "d=" + std::to_string(c.d) + " eps=" + fmt(c.epsilon) + " probability " +
                                fmt(prob) + " below " + fmt(floor));
  }
  v.note("smallest margin over the Chebyshev bound " + fmt(slack_min));
  return v.outcome();
}

Outcome check_theorem_volume() {
  Verdict v;
  for (const auto& c : hps_cases()) {
    const HpsReport h = hps_report(c.summary, c.epsilon, 0.0);
    const HpsVolume vol = hps_volume_quadrature(c.slf, c.summary.log_z, c.summary, c.epsilon);
    const bool ok = vol.log_volume >= h.log_vol_lower &&
                    vol.log_volume <= h.log_vol_upper + std::log1p(1e-6);
    v.expect(ok, "d=" + std::to_string(c.d) + " eps=" + fmt(c.epsilon) + " ln vol " + fmt(vol.log_volume) +
                     " outside [" + fmt(h.log_vol_lower) + ", " + fmt(h.log_vol_upper) + "]");
  }
  v.note("volume inside the Chebyshev/upper bounds for all cases");
  return v.outcome();
}

Outcome check_mode_exclusion() {
  Verdict v;
  const PosteriorSummary s100 = summary_analytic(GaussianBallParams(0.01, 100));
  const HpsReport h = hps_report(s100, 3.0 * s100.sigma_p, 0.0);
  v.expect(h.mode_excluded, "ln L = 0 inside the d=100 interval");
  v.expect(std::abs(h.ln_l_interval.first + 71.2132) < 1e-3 && std::abs(h.ln_l_interval.second + 28.7868) < 1e-3,
           "d=100 interval [" + fmt(h.ln_l_interval.first) + ", " + fmt(h.ln_l_interval.second) + "]");
  for (Eigen::Index d = 1; d <= 40; ++d) {
    const PosteriorSummary s = summary_analytic(GaussianBallParams(0.01, d));
    const bool excluded = hps_report(s, 3.0 * s.sigma_p, 0.0).mode_excluded;
    v.expect(excluded == (d >= 19), "unexpected mode_excluded at d=" + std::to_string(d));
  }
  v.note("transition at d=19");
  return v.outcome();
}

Outcome check_subset_tail() {
  const GaussianBallParams p(0.01, 10);
  SubsetConfig cfg;
  cfg.n_per_level = 2000;
  cfg.seed = 0;
  const EstimatedCurves est = subset_ccdf(make_gaussian_ball_model(0.01, 10), cfg);
  Verdict v;
  const double lx = std::log(1e-6);
  v.expect(est.slf.log_x()[0] <= std::log(1e-8), "curve stops at x=" + fmt(std::exp(est.slf.log_x()[0])));
  if (est.slf.log_x()[0] <= lx) {
    const double got = est.slf.log_l_at(lx);
    const double want = slf_analytic_log_x(p, lx);
    v.expect(std::abs(got - want) <= 0.05 * std::abs(want),
             "ln L(1e-6) " + fmt(got) + " vs analytic " + fmt(want));
    v.note("ln L(1e-6) " + fmt(got) + " vs analytic " + fmt(want));
  }
  return v.outcome();
}

Outcome check_conjugate_oracle() {
  const LikelihoodModel model = make_gaussian_conjugate_model(1.0, 4);
  std::vector<double> log_z, gain;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SubsetConfig cfg;
    cfg.n_per_level = 1000;
    cfg.seed = seed;
    const EstimatedCurves est = subset_ccdf(model, cfg);
    const PosteriorSummary s = summarize(est.slf);
    log_z.push_back(s.log_z);
    gain.push_back(s.info_gain);
  }
  const SampleMoments mz = sample_moments(log_z), mg = sample_moments(gain);
  const double want_z = -2.0 * std::log(2.0), want_g = 2.0 * std::log(2.0) - 1.0;
  Verdict v;
  v.expect(std::abs(mz.mean - want_z) <= 3.0 * mz.standard_error(),
           "ln z " + fmt(mz.mean) + " +- " + fmt(mz.standard_error()) + " vs " + fmt(want_z));
  v.expect(std::abs(mg.mean - want_g) <= 3.0 * mg.standard_error(),
           "G " + fmt(mg.mean) + " +- " + fmt(mg.standard_error()) + " vs " + fmt(want_g));
  v.note("ln z " + fmt(mz.mean) + ", G " + fmt(mg.mean));
  return v.outcome();
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      {"evidence-oracle", check_evidence_oracle},
      {"evidence-two-forms", check_evidence_two_forms},
      {"gamma-moments", check_gamma_moments},
      {"slf-curve-evidence", check_slf_evidence},
      {"effective-dimension", check_de_recovery},
      {"stirling-consistency", check_stirling},
      {"inverse-identity", check_inverse_identity},
      {"ks-distribution-identity", check_ks_identity},
      {"dkw-envelope", check_dkw_envelope},
      {"theorem-probability-bound", check_theorem_probability},
      {"theorem-volume-bounds", check_theorem_volume},
      {"mode-exclusion", check_mode_exclusion},
      {"subset-tail", check_subset_tail},
      {"conjugate-oracle", check_conjugate_oracle},
  };
  return all;
}

// Restores the log-gamma fault on every exit path.
struct FaultScope {
  explicit FaultScope(double offset) : previous(testing::log_gamma_fault()) {
    testing::set_log_gamma_fault(offset);
  }
  ~FaultScope() { testing::set_log_gamma_fault(previous); }
  double previous;
};

}  // namespace

int cmd_validate(const ValidateOptions& options, std::ostream& log) {
  using clock = std::chrono::steady_clock;
  const FaultScope fault(options.log_gamma_fault);
  const auto start = clock::now();

  json rows = json::array();
  std::string first_failure;
  log << std::left << std::setw(28) << "check" << std::setw(6) << "status" << "  detail\n";
  for (const auto& check : checks()) {
    const auto t0 = clock::now();
    Outcome out;
    try {
      out = check.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
    log << std::setw(28) << check.name << std::setw(6) << (out.passed ? "PASS" : "FAIL") << "  " << out.detail
        << " (" << std::fixed << std::setprecision(2) << seconds << " s)\n"
        << std::defaultfloat;
    if (!out.passed && first_failure.empty()) first_failure = check.name;
    rows.push_back({{"name", check.name}, {"passed", out.passed}, {"detail", out.detail}, {"seconds", seconds}});
  }
  const double total = std::chrono::duration<double>(clock::now() - start).count();
  if (total > options.soft_budget_seconds) {
    log << "warning: validate took " << total << " s, above the " << options.soft_budget_seconds
        << " s budget\n";
  }

  const json report = {{"passed", first_failure.empty()},
                       {"first_failure", first_failure.empty() ? json(nullptr) : json(first_failure)},
                       {"total_seconds", total},
                       {"checks", rows}};
  try {
    std::filesystem::create_directories(options.output_dir);
    write_file_atomic(std::filesystem::path(options.output_dir) / "validate.json", report.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "output failure: " << e.what() << "\n";
  }

  if (!first_failure.empty()) {
    log << "validation failed: " << first_failure << "\n";
    return kExitValidation;
  }
  log << "all " << checks().size() << " checks passed\n";
  return kExitOk;
}

}  // namespace ccdfx::cli
