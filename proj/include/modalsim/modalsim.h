/* C interface to the modal-interpretation scenario runner.
 *
 * Configurations are opaque handles; every entry point that can fail takes
 * an optional error buffer and returns one of the status codes below. The
 * codes match the process exit codes of the bundled command-line tool.
 */

#ifndef MODALSIM_H
#define MODALSIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  MODALSIM_OK = 0,
  MODALSIM_ERR_VALIDATION = 1, /* bad configuration value or file */
  MODALSIM_ERR_INVARIANT = 2,  /* a numerical invariant failed during the run */
  MODALSIM_ERR_ARG = 3         /* null handle, unknown key, out-of-range index */
};

typedef struct modalsim_config modalsim_config;

const char* modalsim_version(void);

int modalsim_scenario_count(void);
/* Returns NULL when index is out of range. */
const char* modalsim_scenario_name(int index);

/* Tuned defaults for the named scenario; NULL on an unknown name. */
modalsim_config* modalsim_config_default(const char* scenario);

/* Parses a key = value file over the per-scenario defaults. scenario may be
 * NULL to honor the file's own scenario line. Returns NULL on failure with
 * the full issue list in errbuf. */
modalsim_config* modalsim_config_load(const char* path, const char* scenario,
                                      char* errbuf, size_t errlen);

/* Single-field access by dotted key (e.g. "detector.sigma"). Values are
 * exchanged as text in the same format the config files use. */
int modalsim_config_set(modalsim_config* cfg, const char* key, const char* value,
                        char* errbuf, size_t errlen);
int modalsim_config_get(const modalsim_config* cfg, const char* key,
                        char* out, size_t outlen);

void modalsim_config_free(modalsim_config* cfg);

/* Validates, runs the configured scenario, and writes <scenario>.csv plus
 * <scenario>.summary.txt under the configured output directory. *passed
 * (optional) reports whether every threshold check in the summary held. */
int modalsim_run(const modalsim_config* cfg, int* passed, char* errbuf, size_t errlen);

#ifdef __cplusplus
}
#endif

#endif /* MODALSIM_H */
