/*
 * starsec - outage-constrained sum-secrecy-rate optimization for
 * STAR-RIS-aided MISO wiretap systems with energy-harvesting eavesdroppers.
 *
 * C API: opaque handles, integer status codes, thread-local error text.
 * Every object returned through an out-parameter is owned by the caller
 * and released with the matching *_free function.
 */
#ifndef STARSEC_H
#define STARSEC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define STARSEC_API __declspec(dllexport)
#else
#define STARSEC_API __attribute__((visibility("default")))
#endif

/* Status codes; mirrored by the CLI exit codes. */
#define STARSEC_OK 0
#define STARSEC_ERROR 1
#define STARSEC_INFEASIBLE 2

typedef struct starsec_config starsec_config;
typedef struct starsec_channels starsec_channels;
typedef struct starsec_result starsec_result;

STARSEC_API const char* starsec_version(void);

/* Message describing the most recent failure on this thread. */
STARSEC_API const char* starsec_last_error(void);

/* ----- configuration ----- */

/* Fresh config with the default simulation parameters pre-filled. */
STARSEC_API starsec_config* starsec_config_create(void);
STARSEC_API void starsec_config_free(starsec_config* cfg);

/* Sets one field by name ("num_elements", "p_max_dbw", ...). */
STARSEC_API int starsec_config_set(starsec_config* cfg, const char* key, const char* value);

/* Reads a key = value config file over the current contents. */
STARSEC_API int starsec_config_load(starsec_config* cfg, const char* path);

/* Serialized key = value form (written into buf, NUL-terminated). */
STARSEC_API int starsec_config_dump(const starsec_config* cfg, char* buf, size_t buflen);

/* Validates every invariant; all violations are joined into buf.
 * Returns STARSEC_OK when valid. */
STARSEC_API int starsec_config_validate(const starsec_config* cfg, char* buf, size_t buflen);

/* ----- channels ----- */

STARSEC_API int starsec_channels_generate(const starsec_config* cfg, uint64_t seed,
                                          starsec_channels** out);
STARSEC_API int starsec_channels_save(const starsec_channels* ch, const char* path);
STARSEC_API int starsec_channels_load(const char* path, starsec_channels** out);
STARSEC_API void starsec_channels_free(starsec_channels* ch);

/* ----- single optimization run ----- */

/* baseline: "es-ipcsi", "ms-ipcsi", "ris-ipcsi", "es-pcsi" or "ms-pcsi".
 * Returns STARSEC_INFEASIBLE when the instance cannot meet the energy
 * demand (a result object is still produced and must be freed). */
STARSEC_API int starsec_run(const starsec_config* cfg, const starsec_channels* ch,
                            const char* baseline, starsec_result** out);

/* Named scalar metrics: "ssr", "ssr_pcsi", "energy_t", "energy_r",
 * "s_star_t", "s_star_r", "sop_t", "sop_r", "gamma_b_t", "gamma_b_r",
 * "gamma_e_t", "gamma_e_r", "iterations", "converged", "used_sop". */
STARSEC_API int starsec_result_metric(const starsec_result* res, const char* name, double* out);

/* One CSV row of the full secrecy report (header via starsec_report_header). */
STARSEC_API int starsec_result_report_csv(const starsec_result* res, char* buf, size_t buflen);
STARSEC_API const char* starsec_report_header(void);

/* Per-iteration convergence trace as CSV. */
STARSEC_API int starsec_result_trace_csv(const starsec_result* res, char* buf, size_t buflen);

STARSEC_API const char* starsec_result_status(const starsec_result* res);
STARSEC_API void starsec_result_free(starsec_result* res);

/* ----- experiment sweeps ----- */

/* Runs a parameter sweep and writes the aggregate CSV (and optionally an
 * SVG plot). param: "m", "n-t", "e-min-db", "p-max-dbw" or "delta";
 * baselines: comma-separated names; timing: non-zero records wall time
 * (breaks byte-reproducibility of the CSV). Returns STARSEC_INFEASIBLE
 * when some sweep cell ends up with no feasible trial. */
STARSEC_API int starsec_sweep(const starsec_config* cfg, const char* param, const double* values,
                              size_t n_values, const char* baselines, int trials, uint64_t seed,
                              int timing, const char* csv_path, const char* svg_path_or_null);

/* Same, with the sweep description read from a key = value file
 * (param/values/baselines/trials/seed/timing/override.<field> entries). */
STARSEC_API int starsec_sweep_file(const starsec_config* cfg, const char* spec_path,
                                   const char* csv_path, const char* svg_path_or_null);

/* ----- verification helpers ----- */

/* Closed-form secrecy-outage probability vs sampling oracle on `instances`
 * random instances; human-readable table into buf. Returns STARSEC_OK when
 * every instance agrees within 3*stderr + 0.005. */
STARSEC_API int starsec_verify_sop(int instances, int64_t samples, uint64_t seed, char* buf,
                                   size_t buflen);

/* Brute-force reference on a tiny instance (M <= 3): best attainable SSR
 * via exhaustive search, for comparing against the optimizer. */
STARSEC_API int starsec_oracle_ssr(const starsec_config* cfg, const starsec_channels* ch,
                                   const char* protocol /* "es" or "ms" */, double* out);

#ifdef __cplusplus
}
#endif

#endif /* STARSEC_H */
