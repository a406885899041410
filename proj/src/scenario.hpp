#pragma once

// Named end-to-end scenarios over the core library. Each run produces a
// data table (CSV text) and a summary with the key metrics checked against
// their thresholds, plus the echoed configuration so the run is
// reproducible from the summary alone. No file I/O happens here; the
// writer below is the only place that touches the filesystem.

#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace modal {

struct ScenarioResult {
  std::string csv;
  std::string summary;
  std::map<std::string, double> metrics;  // named values, for programmatic use
  std::vector<std::string> warnings;
  bool passed = true;  // every threshold check in the summary held
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Writes <scenario>.csv and <scenario>.summary.txt under cfg.output_dir,
// creating the directory if needed; returns the two paths.
std::vector<std::string> write_outputs(const ScenarioConfig& cfg, const ScenarioResult& result);

}  // namespace modal
