#ifndef SEGREKIN_H
#define SEGREKIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(SEGREKIN_BUILDING_LIBRARY)
#define SEGREKIN_API __attribute__((visibility("default")))
#else
#define SEGREKIN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum segrekin_status {
  SEGREKIN_OK = 0,
  SEGREKIN_INVALID_ARGUMENT = 1,
  SEGREKIN_GRID_MISMATCH = 2,
  SEGREKIN_STABILITY_VIOLATION = 3,
  SEGREKIN_NOT_CONVERGED = 4,
  SEGREKIN_POSITIVITY = 5,
  SEGREKIN_IO = 6,
  SEGREKIN_CONFIG = 7,
  SEGREKIN_INTERNAL = 8
} segrekin_status;

typedef struct segrekin_config segrekin_config;
typedef struct segrekin_manifest segrekin_manifest;
typedef struct segrekin_kernel segrekin_kernel;

SEGREKIN_API const char* segrekin_version(void);
SEGREKIN_API const char* segrekin_status_name(int status);
/* Message of the last failed call on this thread; empty when none. */
SEGREKIN_API const char* segrekin_last_error(void);

SEGREKIN_API int segrekin_set_threads(int threads);
SEGREKIN_API int segrekin_get_threads(void);

/* `experiment` may be NULL; otherwise it fills or must match run.experiment. */
SEGREKIN_API int segrekin_config_parse(const char* text, const char* experiment, segrekin_config** out);
SEGREKIN_API int segrekin_config_load(const char* path, const char* experiment, segrekin_config** out);
SEGREKIN_API const char* segrekin_config_echo(const segrekin_config* cfg);
SEGREKIN_API const char* segrekin_config_experiment(const segrekin_config* cfg);
SEGREKIN_API int segrekin_config_get(const segrekin_config* cfg, const char* key, const char** value);
SEGREKIN_API void segrekin_config_free(segrekin_config* cfg);

/* seed == NULL uses run.seed; threads <= 0 keeps the current worker count.
   On failure an error record error.json is written into out_dir when possible. */
SEGREKIN_API int segrekin_run(const segrekin_config* cfg, const char* out_dir, const uint64_t* seed, int threads,
                              segrekin_manifest** out);
SEGREKIN_API const char* segrekin_manifest_json(const segrekin_manifest* m);
SEGREKIN_API size_t segrekin_manifest_file_count(const segrekin_manifest* m);
SEGREKIN_API const char* segrekin_manifest_file_path(const segrekin_manifest* m, size_t i);
SEGREKIN_API const char* segrekin_manifest_file_sha256(const segrekin_manifest* m, size_t i);
SEGREKIN_API int segrekin_manifest_summary(const segrekin_manifest* m, const char* key, double* value);
SEGREKIN_API void segrekin_manifest_free(segrekin_manifest* m);

/* Kac kernel on a periodic grid. shape: "tophat", "smooth_bump" or "gaussian".
   cells[1] and extent[1] are ignored for dim = 1. */
SEGREKIN_API int segrekin_kernel_create(const char* shape, double radius, double width, double amplitude, int dim,
                                        const double* extent, const int* cells, segrekin_kernel** out);
SEGREKIN_API int segrekin_kernel_uhat0(const segrekin_kernel* k, double* out);
SEGREKIN_API int segrekin_critical_temperature(const segrekin_kernel* k, double rho, double* out);
SEGREKIN_API int segrekin_coexistence(const segrekin_kernel* k, double T, double rho, double* phi_star);
SEGREKIN_API int segrekin_dispersion_rate(const segrekin_kernel* k, long m0, long m1, double rho_bar, double T_bar,
                                          double D_diff, double* out);
SEGREKIN_API void segrekin_kernel_free(segrekin_kernel* k);

SEGREKIN_API int segrekin_snapshot_write(const char* path, uint32_t rank, const uint64_t* dims, const double* data);
/* *data is allocated by the library; release with segrekin_free. dims holds up to 16 entries. */
SEGREKIN_API int segrekin_snapshot_read(const char* path, uint32_t* rank, uint64_t dims[16], double** data);
SEGREKIN_API void segrekin_free(void* p);

#ifdef __cplusplus
}
#endif

#endif
