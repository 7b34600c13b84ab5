#ifndef ADIABENCH_H
#define ADIABENCH_H

/* C interface to the adiabench core. Every call returns an adb_status; on
 * anything but ADB_OK, adb_last_error() holds a message for the calling
 * thread. Handles are opaque and released with their matching _free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADB_API __declspec(dllexport)
#else
#define ADB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum adb_status {
  ADB_OK = 0,
  ADB_INVALID_ARGUMENT,
  ADB_CONFIG,
  ADB_NUMERIC_INSTABILITY,
  ADB_NO_PULSE,
  ADB_ORDERING,
  ADB_ABOVE_BARRIER,
  ADB_DIVISION,
  ADB_DEGENERATE_GAP,
  ADB_NO_ADMISSIBLE_GAP,
  ADB_SCHEDULE,
  ADB_VALIDATION,
  ADB_CAUSALITY,
  ADB_SINGULARITY,
  ADB_GRID_TOO_SMALL,
  ADB_NOT_CONVERGED,
  ADB_IO,
  ADB_SCHEMA,
  ADB_INTERNAL
} adb_status;

typedef struct adb_config adb_config;
typedef struct adb_model adb_model;
typedef struct adb_dmft_result adb_dmft_result;
typedef struct adb_manifest adb_manifest;

ADB_API const char* adb_last_error(void);
ADB_API const char* adb_status_name(adb_status s);

/* configuration */
ADB_API adb_status adb_config_default(adb_config** out);
ADB_API adb_status adb_config_parse(const char* text, adb_config** out);
ADB_API adb_status adb_config_load(const char* path, adb_config** out);
/* Applies `key = value` with the parser's checks; cfg is unchanged on error. */
ADB_API adb_status adb_config_set(adb_config* cfg, const char* key, const char* value);
ADB_API adb_status adb_config_set_seed(adb_config* cfg, uint64_t seed);
ADB_API adb_status adb_config_set_output_dir(adb_config* cfg, const char* dir);
ADB_API uint64_t adb_config_seed(const adb_config* cfg);
ADB_API const char* adb_config_output_dir(const adb_config* cfg);
/* *out is heap text, released with adb_string_free. */
ADB_API adb_status adb_config_serialize(const adb_config* cfg, char** out);
ADB_API void adb_string_free(char* s);
ADB_API void adb_config_free(adb_config* cfg);

/* laser */
typedef struct adb_pulse_metrics {
  double peak_power_w;
  double peak_time_s;
  double fwhm_s;
  double total_out_j;
} adb_pulse_metrics;

/* Writes the decimated trace to csv_path when it is non-NULL. */
ADB_API adb_status adb_laser_simulate(const adb_config* cfg, const char* csv_path, adb_pulse_metrics* out);
ADB_API adb_status adb_laser_sweep_energy(const adb_config* cfg, const char* csv_path);
ADB_API adb_status adb_laser_sweep_dt(const adb_config* cfg, const char* csv_path);

/* tunnelling */
typedef struct adb_tunnel_result {
  double k2_per_m;
  double exponent;
  double transmission;
} adb_tunnel_result;

ADB_API adb_status adb_tunnel_transmission(double u_ev, double e_ev, double width_m, double mass_kg,
                                           adb_tunnel_result* out);
/* Uses the tunnel section of cfg; csv_path may be NULL. */
ADB_API adb_status adb_tunnel_run(const adb_config* cfg, const char* csv_path, adb_tunnel_result* out);
ADB_API adb_status adb_barrier_height_bohr(double z_eff, unsigned n1, unsigned n2, double* ev);
ADB_API adb_status adb_average_electron_energy(double total_j, double count, double fraction, double* ev);

/* energy models */
ADB_API adb_status adb_model_from_table(const double* energies, size_t n, adb_model** out);
/* couplings: sites*sites row-major, symmetric with zero diagonal. */
ADB_API adb_status adb_model_from_ising(unsigned sites, const double* couplings, double transverse_field,
                                        adb_model** out);
ADB_API adb_status adb_model_from_config(const adb_config* cfg, adb_model** out);
ADB_API uint64_t adb_model_size(const adb_model* m);
ADB_API adb_status adb_model_energy(const adb_model* m, uint64_t id, double* out);
ADB_API void adb_model_free(adb_model* m);

/* optimizer */
typedef struct adb_optimizer_report {
  uint64_t best_id;
  double best_energy;
  uint64_t visited;
  uint64_t comparisons;
  uint64_t escapes;
  uint64_t candidates;
  uint64_t seed;
} adb_optimizer_report;

typedef struct adb_scaling_summary {
  uint64_t runs;
  uint64_t bound_violations;
  double r2;
} adb_scaling_summary;

ADB_API adb_status adb_optimize_run(const adb_config* cfg, const char* csv_path, adb_optimizer_report* out);
/* Greedy baseline and full evolution on a prepared model with cfg's
 * schedule settings. */
ADB_API adb_status adb_optimize_greedy(const adb_model* m, uint64_t seed, adb_optimizer_report* out);
ADB_API adb_status adb_optimize_evolve(const adb_model* m, const adb_config* cfg, uint64_t seed,
                                       adb_optimizer_report* out);
ADB_API adb_status adb_optimize_scaling(const adb_config* cfg, const char* csv_path, adb_scaling_summary* out);

/* DMFT. A run that exhausts max_iter returns ADB_NOT_CONVERGED and still
 * hands back *out. CSV paths may be NULL. */
ADB_API adb_status adb_dmft_run(const adb_config* cfg, const char* iterations_csv, const char* green_csv,
                                adb_dmft_result** out);
ADB_API size_t adb_dmft_iterations(const adb_dmft_result* r);
ADB_API double adb_dmft_residual(const adb_dmft_result* r);
ADB_API int adb_dmft_converged(const adb_dmft_result* r);
ADB_API size_t adb_dmft_size(const adb_dmft_result* r);
ADB_API adb_status adb_dmft_g_imp(const adb_dmft_result* r, size_t n, double* re, double* im);
ADB_API adb_status adb_dmft_sigma(const adb_dmft_result* r, size_t n, double* re, double* im);
ADB_API void adb_dmft_free(adb_dmft_result* r);

/* reproduce: ADB_OK whenever the manifest was written, even with failing
 * tables; inspect adb_manifest_all_pass. */
typedef struct adb_manifest_entry {
  const char* table;
  const char* output_file;
  const char* status; /* pass | trend | fail */
  const char* tolerance;
  const char* detail;
} adb_manifest_entry;

ADB_API adb_status adb_reproduce(const adb_config* cfg, adb_manifest** out);
ADB_API size_t adb_manifest_size(const adb_manifest* m);
ADB_API adb_status adb_manifest_entry_at(const adb_manifest* m, size_t i, adb_manifest_entry* out);
ADB_API int adb_manifest_all_pass(const adb_manifest* m);
ADB_API void adb_manifest_free(adb_manifest* m);

#ifdef __cplusplus
}
#endif

#endif
