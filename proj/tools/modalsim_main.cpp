// Command-line front end. Deliberately thin: everything goes through the
// public C interface so this doubles as a smoke test of the shared library.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "modalsim/modalsim.h"

int main(int argc, char** argv) {
  CLI::App app{"modalsim: relational quantum measurement scenarios"};
  std::string scenario, config_path, out_dir;
  std::uint64_t seed = 0;
  bool list = false;

  app.add_flag("--list-scenarios", list, "print the available scenario names and exit");
  app.add_option("--scenario", scenario, "scenario to run (see --list-scenarios)");
  app.add_option("--config", config_path, "key = value configuration file");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "seed override");
  CLI::Option* out_opt = app.add_option("--out", out_dir, "output directory override");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (int i = 0; i < modalsim_scenario_count(); ++i)
      std::printf("%s\n", modalsim_scenario_name(i));
    return 0;
  }

  char err[8192] = {0};
  modalsim_config* cfg = nullptr;
  if (!config_path.empty()) {
    cfg = modalsim_config_load(config_path.c_str(),
                               scenario.empty() ? nullptr : scenario.c_str(), err, sizeof err);
    if (!cfg) {
      std::fprintf(stderr, "%s\n", err);
      return 1;
    }
  } else {
    if (scenario.empty()) {
      std::fprintf(stderr, "need --scenario or --config\n");
      return 1;
    }
    cfg = modalsim_config_default(scenario.c_str());
    if (!cfg) {
      std::fprintf(stderr, "unknown scenario '%s'\n", scenario.c_str());
      return 1;
    }
  }

  if (seed_opt->count() > 0 &&
      modalsim_config_set(cfg, "seed", std::to_string(seed).c_str(), err, sizeof err) !=
          MODALSIM_OK) {
    std::fprintf(stderr, "%s\n", err);
    modalsim_config_free(cfg);
    return 1;
  }
  if (out_opt->count() > 0 &&
      modalsim_config_set(cfg, "output_dir", out_dir.c_str(), err, sizeof err) != MODALSIM_OK) {
    std::fprintf(stderr, "%s\n", err);
    modalsim_config_free(cfg);
    return 1;
  }

  char name[128] = {0};
  char dir[4096] = {0};
  modalsim_config_get(cfg, "scenario", name, sizeof name);
  modalsim_config_get(cfg, "output_dir", dir, sizeof dir);

  int passed = 0;
  int rc = modalsim_run(cfg, &passed, err, sizeof err);
  modalsim_config_free(cfg);
  if (rc != MODALSIM_OK) {
    std::fprintf(stderr, "%s\n", err);
    return rc == MODALSIM_ERR_VALIDATION ? 1 : 2;
  }
  std::printf("wrote %s/%s.csv and %s/%s.summary.txt\n", dir, name, dir, name);
  std::printf("verdict: %s\n", passed ? "PASS" : "FAIL");
  return 0;
}
