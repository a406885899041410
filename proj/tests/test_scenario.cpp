#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "scenario.hpp"

using namespace modal;

namespace {

ScenarioConfig quick(const std::string& name) {
  ScenarioConfig cfg = default_config(name);
  cfg.seed = 20260825;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("epr scenario meets its thresholds and reports metrics") {
  ScenarioResult r = run_scenario(quick("epr"));
  CHECK(r.passed);
  CHECK(r.metrics.at("max_reduced_rho2_change") <= 1e-12);
  CHECK(r.metrics.at("min_partner_fidelity") >= 1.0 - 1e-10);
  CHECK(r.metrics.at("pair_candidates_doubly_degenerate") == 1.0);
  CHECK(count_lines(r.csv) == 1 + 12);  // 6 bases, 2 outcomes each
  CHECK(r.summary.find("verdict: PASS") != std::string::npos);
  CHECK(r.summary.find("scenario = epr") != std::string::npos);  // echoed config
  CHECK(r.summary.find("FAIL") == std::string::npos);
}

TEST_CASE("oracle suite scenario stays under 1e-9") {
  ScenarioResult r = run_scenario(quick("oracle-suite"));
  CHECK(r.passed);
  CHECK(r.metrics.at("max_deviation") <= 1e-9);
  CHECK(r.metrics.at("checks_run") >= 13.0);
}

TEST_CASE("two-observers scenario agreement") {
  ScenarioResult r = run_scenario(quick("two-observers"));
  CHECK(r.passed);
  CHECK(r.metrics.at("agreement_mass_w1") >= 0.99);
  // 32 x 32 joint table plus the header
  CHECK(count_lines(r.csv) == 1 + 32 * 32);
}

TEST_CASE("localization scenario narrows the object state") {
  ScenarioResult r = run_scenario(quick("localization"));
  CHECK(r.passed);
  CHECK(r.metrics.at("max_posterior_std_image") <= 2.0 * 0.0078125);
  CHECK(r.metrics.at("prior_std_image_over_bound") >= 25.0);
}

TEST_CASE("recoil scenario separates the kernel limits") {
  ScenarioResult r = run_scenario(quick("recoil"));
  CHECK(r.passed);
  CHECK(r.metrics.at("max_diff_orthogonal_vs_free") <= 1e-12);
  CHECK(r.metrics.at("max_diff_flat_vs_free") >= 0.01);
}

TEST_CASE("trajectory scenario lands on the classical prediction") {
  ScenarioResult r = run_scenario(quick("trajectory"));
  CHECK(r.passed);
  CHECK(r.metrics.at("window_mass") >= 0.95);
  CHECK(r.metrics.at("momentum_peak_error_steps") <= 3.0);
  CHECK(r.warnings.empty());
}

TEST_CASE("deloc-device scenario localizes relative to the pointer") {
  ScenarioResult r = run_scenario(quick("deloc-device"));
  CHECK(r.passed);
  CHECK(r.metrics.at("agreement_mass_w1") >= 0.99);
  CHECK(r.metrics.at("com_to_relative_ratio") >= 10.0);
}

TEST_CASE("decoherence scenario runs at reduced scale") {
  // Small sweep: exercises the full code path (scaling, Haar control,
  // verdicts, plateau probe) without the production cost. The thresholds
  // are tuned for the full sweep, so only structure is asserted here.
  ScenarioConfig cfg = quick("decoherence");
  cfg.k1 = 2;
  cfg.k2 = 2;
  cfg.d_list = {8, 16, 32, 64};
  cfg.trials = 8;
  ScenarioResult r = run_scenario(cfg);
  CHECK(count_lines(r.csv) == 1 + 4);
  CHECK(r.metrics.count("offdiag_max_exponent") == 1);
  CHECK(r.metrics.at("offdiag_max_exponent") < 0.0);
  CHECK(r.metrics.at("haar_control_rel_error") <= 0.10);
  CHECK(r.metrics.at("small_env_indefinite") == 1.0);
  CHECK(r.metrics.at("level_spacing_ref") == doctest::Approx(2.0 / 16.0).epsilon(1e-14));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  for (const std::string name : {"epr", "recoil"}) {
    ScenarioResult a = run_scenario(quick(name));
    ScenarioResult b = run_scenario(quick(name));
    CHECK(a.csv == b.csv);
    CHECK(a.summary == b.summary);
  }
}

TEST_CASE("invalid configuration is rejected before any work") {
  ScenarioConfig cfg = quick("epr");
  cfg.sigma = -1.0;
  CHECK_THROWS_AS((void)run_scenario(cfg), ConfigError);
  ScenarioConfig cfg2 = quick("trajectory");
  cfg2.t = 0.0;  // valid generally, but the trajectory needs a flight
  CHECK_THROWS_AS((void)run_scenario(cfg2), ConfigError);
}

TEST_CASE("writer puts the exact bytes on disk") {
  namespace fs = std::filesystem;
  ScenarioConfig cfg = quick("epr");
  cfg.output_dir = (fs::temp_directory_path() / "modalsim_scenario_test").string();
  ScenarioResult r = run_scenario(cfg);
  std::vector<std::string> paths = write_outputs(cfg, r);
  REQUIRE(paths.size() == 2);
  CHECK(slurp(paths[0]) == r.csv);
  CHECK(slurp(paths[1]) == r.summary);
  fs::remove_all(cfg.output_dir);
}
