#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "config.hpp"
#include "errors.hpp"

using namespace modal;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
  for (const auto& issue : e.issues()) {
    if (issue.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("empty text yields the full default configuration") {
  ScenarioConfig cfg = parse_config("");
  ScenarioConfig ref = default_config("localization");
  CHECK(cfg.scenario == ref.scenario);
  CHECK(cfg.grid_m == ref.grid_m);
  CHECK(cfg.sigma == ref.sigma);
  CHECK(cfg.seed == ref.seed);
  CHECK(cfg.output_dir == ref.output_dir);
  CHECK(cfg.d_list == ref.d_list);
}

TEST_CASE("per scenario defaults differ where they should") {
  ScenarioConfig loc = default_config("localization");
  ScenarioConfig two = default_config("two-observers");
  ScenarioConfig rec = default_config("recoil");
  ScenarioConfig dec = default_config("decoherence");
  CHECK(loc.grid_m == 1024);
  CHECK(loc.detector_n == 64);
  CHECK(loc.sigma == doctest::Approx(2.0 / 64 / 4).epsilon(1e-15));
  CHECK(two.grid_m == 256);
  CHECK(two.detector_n == 32);
  CHECK(two.sigma == doctest::Approx(2.0 / 32 / 2).epsilon(1e-15));
  CHECK(rec.x_min == -0.5);
  CHECK(rec.detector_n == 8);
  CHECK(dec.d_list.size() == 7);
  CHECK(dec.trials == 20);
  CHECK_THROWS_AS((void)default_config("no-such-thing"), ConfigError);
}

TEST_CASE("overrides apply on top of scenario defaults") {
  std::string text =
      "# comment line\n"
      "scenario = trajectory\n"
      "grid.M = 256   # trailing comment\n"
      "dynamics.mass = 700\n"
      "seed = 42\n"
      "decoherence.D_list = 8, 16, 32\n";
  ScenarioConfig cfg = parse_config(text);
  CHECK(cfg.scenario == "trajectory");
  CHECK(cfg.grid_m == 256);
  CHECK(cfg.mass == 700.0);
  CHECK(cfg.seed == 42);
  CHECK(cfg.d_list == std::vector<Eigen::Index>{8, 16, 32});
  // untouched keys keep the trajectory defaults
  CHECK(cfg.x_min == -0.5);
  CHECK(cfg.detector_n == 32);
  CHECK(cfg.t_prime == 0.5);
}

TEST_CASE("command line scenario wins over the file") {
  ScenarioConfig cfg = parse_config("scenario = epr\nseed = 7\n", "two-observers");
  CHECK(cfg.scenario == "two-observers");
  CHECK(cfg.seed == 7);
  CHECK(cfg.grid_m == 256);  // two-observers defaults, not epr's
}

TEST_CASE("unknown keys are rejected with their line number") {
  try {
    parse_config("grid.M = 64\ndetector.sgima = 0.1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "unknown key 'detector.sgima'"));
    CHECK(mentions(e, "line 2"));
  }
}

TEST_CASE("negative sigma is reported against its key") {
  try {
    parse_config("detector.sigma = -1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() == 1);
    CHECK(mentions(e, "detector.sigma"));
    CHECK(mentions(e, "positive"));
  }
}

TEST_CASE("all violations are reported in one pass") {
  std::string text =
      "grid.M = 1\n"
      "grid.x_min = 2\n"
      "grid.x_max = -2\n"
      "detector.sigma = 0\n"
      "dynamics.mass = -5\n"
      "decoherence.trials = 2\n"
      "bogus = 1\n";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() >= 6);
    CHECK(mentions(e, "grid.M"));
    CHECK(mentions(e, "grid.x_max"));
    CHECK(mentions(e, "detector.sigma"));
    CHECK(mentions(e, "dynamics.mass"));
    CHECK(mentions(e, "decoherence.trials"));
    CHECK(mentions(e, "unknown key 'bogus'"));
  }
}

TEST_CASE("malformed lines and values carry line information") {
  try {
    parse_config("this is not a key value pair\ngrid.M = twelve\nseed = -3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "line 1"));
    CHECK(mentions(e, "grid.M"));
    CHECK(mentions(e, "expected an integer"));
    CHECK(mentions(e, "seed"));
  }
}

TEST_CASE("unknown scenario name is part of the issue list") {
  try {
    parse_config("scenario = teleportation\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "unknown scenario 'teleportation'"));
  }
}

TEST_CASE("echoed configuration reparses to the identical object") {
  for (const auto& name : scenario_names()) {
    ScenarioConfig cfg = default_config(name);
    cfg.seed = 977;
    cfg.sigma *= 1.0 + 1e-13;  // a value that needs all 17 digits
    std::string text = echo_config(cfg);
    ScenarioConfig back = parse_config(text);
    CHECK(back.scenario == cfg.scenario);
    CHECK(back.grid_m == cfg.grid_m);
    CHECK(back.x_min == cfg.x_min);
    CHECK(back.x_max == cfg.x_max);
    CHECK(back.detector_n == cfg.detector_n);
    CHECK(back.sigma == cfg.sigma);  // bitwise, not approximate
    CHECK(back.image_scale == cfg.image_scale);
    CHECK(back.image_offset == cfg.image_offset);
    CHECK(back.mass == cfg.mass);
    CHECK(back.t == cfg.t);
    CHECK(back.t_prime == cfg.t_prime);
    CHECK(back.hbar == cfg.hbar);
    CHECK(back.recoil_w == cfg.recoil_w);
    CHECK(back.k1 == cfg.k1);
    CHECK(back.k2 == cfg.k2);
    CHECK(back.d_list == cfg.d_list);
    CHECK(back.beta == cfg.beta);
    CHECK(back.dec_t == cfg.dec_t);
    CHECK(back.trials == cfg.trials);
    CHECK(back.seed == cfg.seed);
    CHECK(back.output_dir == cfg.output_dir);
    // echoing the reparsed config reproduces the text byte for byte
    CHECK(echo_config(back) == text);
  }
}

TEST_CASE("scenario name list is stable") {
  const auto& names = scenario_names();
  REQUIRE(names.size() == 8);
  CHECK(names.front() == "localization");
  CHECK(names.back() == "oracle-suite");
  for (const auto& n : names) CHECK_NOTHROW(validate_config(default_config(n)));
}

TEST_CASE("missing file is a configuration error") {
  CHECK_THROWS_AS((void)load_config("/nonexistent/path/modalsim.cfg"), ConfigError);
}
