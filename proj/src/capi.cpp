#include "modalsim/modalsim.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "scenario.hpp"

struct modalsim_config {
  modal::ScenarioConfig cfg;
};

namespace {

void put_err(char* errbuf, size_t errlen, const std::string& msg) {
  if (!errbuf || errlen == 0) return;
  std::snprintf(errbuf, errlen, "%s", msg.c_str());
}

}  // namespace

extern "C" {

const char* modalsim_version(void) { return "1.0.0"; }

int modalsim_scenario_count(void) {
  return static_cast<int>(modal::scenario_names().size());
}

const char* modalsim_scenario_name(int index) {
  const auto& names = modal::scenario_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[static_cast<size_t>(index)].c_str();
}

modalsim_config* modalsim_config_default(const char* scenario) {
  if (!scenario) return nullptr;
  try {
    auto* h = new modalsim_config{modal::default_config(scenario)};
    return h;
  } catch (const std::exception&) {
    return nullptr;
  }
}

modalsim_config* modalsim_config_load(const char* path, const char* scenario,
                                      char* errbuf, size_t errlen) {
  if (!path) {
    put_err(errbuf, errlen, "path is null");
    return nullptr;
  }
  try {
    auto* h = new modalsim_config{modal::load_config(path, scenario ? scenario : "")};
    return h;
  } catch (const std::exception& e) {
    put_err(errbuf, errlen, e.what());
    return nullptr;
  }
}

int modalsim_config_set(modalsim_config* cfg, const char* key, const char* value,
                        char* errbuf, size_t errlen) {
  if (!cfg || !key || !value) {
    put_err(errbuf, errlen, "null argument");
    return MODALSIM_ERR_ARG;
  }
  std::string error;
  if (!modal::set_config_field(cfg->cfg, key, value, &error)) {
    put_err(errbuf, errlen, error);
    return MODALSIM_ERR_ARG;
  }
  return MODALSIM_OK;
}

int modalsim_config_get(const modalsim_config* cfg, const char* key, char* out, size_t outlen) {
  if (!cfg || !key || !out || outlen == 0) return MODALSIM_ERR_ARG;
  std::string value;
  if (!modal::get_config_field(cfg->cfg, key, &value)) return MODALSIM_ERR_ARG;
  std::snprintf(out, outlen, "%s", value.c_str());
  return MODALSIM_OK;
}

void modalsim_config_free(modalsim_config* cfg) { delete cfg; }

int modalsim_run(const modalsim_config* cfg, int* passed, char* errbuf, size_t errlen) {
  if (!cfg) {
    put_err(errbuf, errlen, "config handle is null");
    return MODALSIM_ERR_ARG;
  }
  try {
    modal::ScenarioResult r = modal::run_scenario(cfg->cfg);
    modal::write_outputs(cfg->cfg, r);
    if (passed) *passed = r.passed ? 1 : 0;
    return MODALSIM_OK;
  } catch (const modal::ConfigError& e) {
    put_err(errbuf, errlen, e.what());
    return MODALSIM_ERR_VALIDATION;
  } catch (const modal::DimensionError& e) {
    // geometry that cannot be built (e.g. responses that never cover a grid
    // point) is a configuration problem, not a runtime surprise
    put_err(errbuf, errlen, e.what());
    return MODALSIM_ERR_VALIDATION;
  } catch (const std::exception& e) {
    put_err(errbuf, errlen, e.what());
    return MODALSIM_ERR_INVARIANT;
  }
}

}  // extern "C"
