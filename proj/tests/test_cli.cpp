#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ccdfx/cli/commands.hpp"
#include "ccdfx/cli/config.hpp"
#include "ccdfx/cli/output.hpp"

using namespace ccdfx;
using namespace ccdfx::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ccdfx_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

RunConfig analytic_ball(double sigma, double d, const fs::path& out) {
  RunConfig c;
  c.model = "gaussian-ball";
  c.params = {{"sigma", sigma}, {"d", d}};
  c.estimator.kind = EstimatorKind::analytic;
  c.output_dir = out.string();
  return c;
}

int run_binary(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(CCDFX_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -277.38, 1e-300, 6.02214076e23, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("CsvWriter") {
  CsvWriter csv({"a", "b", "c"});
  csv.cell(1.5).cell("x").cell(true);
  csv.end_row();
  CHECK(csv.str() == "a,b,c\n1.5,x,true\n");
  csv.cell(std::uint64_t{7});
  CHECK_THROWS(csv.end_row());
}

TEST_CASE("config JSON round trip and rejection") {
  RunConfig c;
  c.model = "bimodal";
  c.params = {{"sep", 1.0}, {"sigma", 0.05}, {"d", 4.0}};
  c.estimator.kind = EstimatorKind::mc;
  c.estimator.mc_samples = 5000;
  c.estimator.subset.thinning = 2;
  c.seeds = {3, 9};
  c.epsilon_rule = EpsilonRule::parse("sqrt-de");
  c.format = OutputFormat::json;
  const json once = to_json(c);
  const json twice = to_json(run_config_from_json(once));
  CHECK(once == twice);
  CHECK(run_config_from_json(once).estimator.subset.thinning == 2);

  json unknown = once;
  unknown["bogus"] = 1;
  CHECK_THROWS_AS(run_config_from_json(unknown), ConfigError);
  CHECK_THROWS_AS(EpsilonRule::parse("-2"), ConfigError);
  CHECK_THROWS_AS(parse_estimator_kind("importance"), ConfigError);
  CHECK(EpsilonRule::parse("0.7").resolve(PosteriorSummary{}) == 0.7);

  RunConfig bad = c;
  bad.estimator.kind = EstimatorKind::analytic;  // no closed form for bimodal
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("analyze writes the documented files") {
  const fs::path out = scratch("analyze");
  std::ostringstream log;
  REQUIRE(cmd_analyze(analytic_ball(0.01, 100, out), log) == kExitOk);
  for (const char* f : {"summary.json", "curves.csv", "density_x.csv", "density_y.csv"}) {
    CHECK(fs::exists(out / f));
  }
  CHECK_FALSE(fs::exists(out / "bootstrap.json"));
  CHECK(first_line(out / "curves.csv") == "seed,x,log_L");
  CHECK(first_line(out / "density_x.csv") == "seed,x,log_density");
  CHECK(first_line(out / "density_y.csv") == "seed,y,log_density");

  const json s = json::parse(slurp(out / "summary.json"));
  const json& run = s["runs"][0];
  CHECK(run["summary"]["mean_Y"].get<double>() == doctest::Approx(-50.0));
  CHECK(run["summary"]["d_e"].get<double>() == doctest::Approx(100.0));
  CHECK(run["hps"]["ln_L_interval"][0].get<double>() == doctest::Approx(-71.2132).epsilon(1e-5));
  CHECK(run["hps"]["ln_L_interval"][1].get<double>() == doctest::Approx(-28.7868).epsilon(1e-5));
  CHECK(run["hps"]["mode_excluded"].get<bool>());
  fs::remove_all(out);
}

TEST_CASE("analyze is byte-for-byte deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  RunConfig c;
  c.params = {{"sigma", 0.01}, {"d", 5.0}};
  c.estimator.subset.n_per_level = 500;
  c.seeds = {1, 2};
  std::ostringstream log;
  c.output_dir = a.string();
  REQUIRE(cmd_analyze(c, log) == kExitOk);
  c.output_dir = b.string();
  REQUIRE(cmd_analyze(c, log) == kExitOk);
  for (const char* f : {"curves.csv", "density_x.csv", "density_y.csv", "bootstrap.json"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  // summary.json differs only in the output directory it records.
  json sa = json::parse(slurp(a / "summary.json")), sb = json::parse(slurp(b / "summary.json"));
  CHECK(sa["runs"] == sb["runs"]);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("conjugate model with a flat likelihood carries no information") {
  const fs::path out = scratch("flat");
  RunConfig c = analytic_ball(1e6, 3, out);
  c.model = "gaussian-conjugate";
  c.estimator.kind = EstimatorKind::mc;
  c.estimator.mc_samples = 2000;
  std::ostringstream log;
  REQUIRE(cmd_analyze(c, log) == kExitOk);
  const json s = json::parse(slurp(out / "summary.json"));
  CHECK(std::abs(s["runs"][0]["summary"]["info_gain_G"].get<double>()) < 1e-9);
  CHECK(std::abs(s["runs"][0]["summary"]["d_e"].get<double>()) < 1e-9);
  fs::remove_all(out);
}

TEST_CASE("analyze exit codes") {
  std::ostringstream log;
  RunConfig bimodal = analytic_ball(0.05, 2, scratch("bad"));
  bimodal.model = "bimodal";
  bimodal.params["sep"] = 1.0;
  CHECK(cmd_analyze(bimodal, log) == kExitConfig);

  RunConfig starved = analytic_ball(0.3, 100, scratch("starved"));
  starved.estimator.kind = EstimatorKind::mc;
  starved.estimator.mc_samples = 1000;
  std::ostringstream flog;
  CHECK(cmd_analyze(starved, flog) == kExitEstimator);
  CHECK(flog.str().find("estimator failure") != std::string::npos);
}

TEST_CASE("sweep output") {
  const fs::path out = scratch("sweep");
  SweepConfig sw;
  sw.base = analytic_ball(0.01, 10, out);
  sw.variable = "d";
  sw.values = {10, 18, 19, 30};
  std::ostringstream log;
  REQUIRE(cmd_sweep(sw, log) == kExitOk);
  std::ifstream in(out / "sweep.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "d,log_z,G,sigma_p,d_e,cov,hps_lo,hps_hi,mode_excluded,vol_upper");
  std::vector<std::string> flags;
  while (std::getline(in, line)) {
    const auto comma = line.rfind(',');
    const auto prev = line.rfind(',', comma - 1);
    flags.push_back(line.substr(prev + 1, comma - prev - 1));
  }
  CHECK(flags == std::vector<std::string>{"false", "false", "true", "true"});
  fs::remove_all(out);
}

TEST_CASE("a failing sweep point becomes a NaN row") {
  const fs::path out = scratch("sweep_nan");
  SweepConfig sw;
  sw.base = analytic_ball(0.3, 2, out);
  sw.base.estimator.kind = EstimatorKind::mc;
  sw.base.estimator.mc_samples = 1000;
  sw.variable = "d";
  sw.values = {2, 100};
  std::ostringstream log;
  REQUIRE(cmd_sweep(sw, log) == kExitOk);
  CHECK(log.str().find("warning") != std::string::npos);
  const std::string text = slurp(out / "sweep.csv");
  CHECK(text.find("\n100,nan,nan,nan,nan,nan,nan,nan,nan,nan\n") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("binary: help, flags and the validate negative control") {
  const fs::path dir = scratch("binary");
  fs::create_directories(dir);
  CHECK(run_binary("--help", dir / "help.txt") == 0);
  CHECK(slurp(dir / "help.txt").find("analyze") != std::string::npos);
  CHECK(run_binary("analyze --bogus-flag", dir / "bogus.txt") == 1);

  const fs::path out = dir / "run";
  REQUIRE(run_binary("analyze --estimator analytic --sigma 0.01 --d 100 --format json --out " + out.string(),
                     dir / "analyze.txt") == 0);
  const json s = json::parse(slurp(out / "summary.json"));
  CHECK(s["config"]["model"]["params"]["d"].get<double>() == 100.0);
  CHECK(fs::exists(out / "curves.json"));

  CHECK(run_binary("validate --inject-log-gamma-fault 0.5 --out " + (dir / "v").string(), dir / "v.txt") == 3);
  const json v = json::parse(slurp(dir / "v" / "validate.json"));
  CHECK_FALSE(v["passed"].get<bool>());
  CHECK(v["first_failure"].get<std::string>() == "evidence-oracle");
  fs::remove_all(dir);
}
