// Exercises the shared library through the C header only: no core headers,
// so this is the same view a foreign-language binding would get.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "modalsim/modalsim.h"

TEST_CASE("version and scenario enumeration") {
  CHECK(std::string(modalsim_version()) == "1.0.0");
  REQUIRE(modalsim_scenario_count() == 8);
  CHECK(std::string(modalsim_scenario_name(0)) == "localization");
  CHECK(std::string(modalsim_scenario_name(7)) == "oracle-suite");
  CHECK(modalsim_scenario_name(8) == nullptr);
  CHECK(modalsim_scenario_name(-1) == nullptr);
}

TEST_CASE("default handles and field access") {
  modalsim_config* cfg = modalsim_config_default("two-observers");
  REQUIRE(cfg != nullptr);
  char buf[256];
  CHECK(modalsim_config_get(cfg, "grid.M", buf, sizeof buf) == MODALSIM_OK);
  CHECK(std::string(buf) == "256");
  CHECK(modalsim_config_set(cfg, "detector.N", "16", nullptr, 0) == MODALSIM_OK);
  CHECK(modalsim_config_get(cfg, "detector.N", buf, sizeof buf) == MODALSIM_OK);
  CHECK(std::string(buf) == "16");

  char err[256] = {0};
  CHECK(modalsim_config_set(cfg, "detector.sgima", "1", err, sizeof err) == MODALSIM_ERR_ARG);
  CHECK(std::string(err).find("unknown key") != std::string::npos);
  CHECK(modalsim_config_set(cfg, "grid.M", "twelve", err, sizeof err) == MODALSIM_ERR_ARG);
  CHECK(modalsim_config_get(cfg, "no.such.key", buf, sizeof buf) == MODALSIM_ERR_ARG);
  modalsim_config_free(cfg);

  CHECK(modalsim_config_default("bogus") == nullptr);
  CHECK(modalsim_config_default(nullptr) == nullptr);
}

TEST_CASE("epr runs end to end through the C interface") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "modalsim_capi_test";
  modalsim_config* cfg = modalsim_config_default("epr");
  REQUIRE(cfg != nullptr);
  REQUIRE(modalsim_config_set(cfg, "output_dir", dir.string().c_str(), nullptr, 0) ==
          MODALSIM_OK);
  REQUIRE(modalsim_config_set(cfg, "seed", "31415", nullptr, 0) == MODALSIM_OK);
  int passed = -1;
  char err[1024] = {0};
  CHECK(modalsim_run(cfg, &passed, err, sizeof err) == MODALSIM_OK);
  CHECK(passed == 1);
  CHECK(fs::exists(dir / "epr.csv"));
  CHECK(fs::exists(dir / "epr.summary.txt"));
  modalsim_config_free(cfg);
  fs::remove_all(dir);
}

TEST_CASE("validation failures map to the validation status") {
  modalsim_config* cfg = modalsim_config_default("epr");
  REQUIRE(modalsim_config_set(cfg, "detector.sigma", "-1", nullptr, 0) == MODALSIM_OK);
  char err[1024] = {0};
  CHECK(modalsim_run(cfg, nullptr, err, sizeof err) == MODALSIM_ERR_VALIDATION);
  CHECK(std::string(err).find("detector.sigma") != std::string::npos);
  modalsim_config_free(cfg);
  CHECK(modalsim_run(nullptr, nullptr, err, sizeof err) == MODALSIM_ERR_ARG);
}

TEST_CASE("config files load through the C interface") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "modalsim_capi_cfg.txt";
  std::ofstream(p) << "scenario = oracle-suite\nseed = 5\n";
  char err[1024] = {0};
  modalsim_config* cfg = modalsim_config_load(p.string().c_str(), nullptr, err, sizeof err);
  REQUIRE(cfg != nullptr);
  char buf[64];
  modalsim_config_get(cfg, "scenario", buf, sizeof buf);
  CHECK(std::string(buf) == "oracle-suite");
  modalsim_config_free(cfg);

  modalsim_config* bad = modalsim_config_load("/no/such/file", nullptr, err, sizeof err);
  CHECK(bad == nullptr);
  CHECK(std::string(err).find("cannot open") != std::string::npos);
  fs::remove(p);
}
