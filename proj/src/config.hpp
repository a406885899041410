#pragma once

// Flat key = value configuration for the scenario runner. Dotted keys group
// the physical parameters; unknown keys are rejected and every violation is
// reported in one pass so a bad file can be fixed in one edit.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace modal {

struct ScenarioConfig {
  std::string scenario = "localization";

  Eigen::Index grid_m = 1024;
  double x_min = -1.0;
  double x_max = 1.0;

  Eigen::Index detector_n = 64;
  double sigma = 0.0078125;
  double image_scale = 1.0;
  double image_offset = 0.0;

  double mass = 2000.0;
  double t = 1.0;
  double t_prime = 0.5;
  double hbar = 1.0;

  double recoil_w = 0.05;

  Eigen::Index k1 = 4;
  Eigen::Index k2 = 4;
  std::vector<Eigen::Index> d_list = {16, 32, 64, 128, 256, 512, 1024};
  double beta = 1.0;
  double dec_t = 2.0;
  int trials = 20;

  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

const std::vector<std::string>& scenario_names();

// Tuned defaults per scenario; throws ConfigError for an unknown name.
ScenarioConfig default_config(const std::string& scenario);

// Parse text over the per-scenario defaults. cli_scenario, when nonempty,
// wins over a scenario= line in the file. All parse, unknown-key and range
// problems are collected and thrown together as one ConfigError.
ScenarioConfig parse_config(const std::string& text, const std::string& cli_scenario = "");

ScenarioConfig load_config(const std::string& path, const std::string& cli_scenario = "");

// Range checks only; throws ConfigError listing every violation by key.
void validate_config(const ScenarioConfig& cfg);

// Canonical text form: parsing it back yields the identical configuration
// (doubles are printed with 17 significant digits).
std::string echo_config(const ScenarioConfig& cfg);

// Single-field access by dotted key, for bindings that patch a config one
// value at a time. set returns false and fills *error on an unknown key or
// unparseable value; get returns false on an unknown key.
bool set_config_field(ScenarioConfig& cfg, const std::string& key, const std::string& value,
                      std::string* error);
bool get_config_field(const ScenarioConfig& cfg, const std::string& key, std::string* out);

}  // namespace modal
