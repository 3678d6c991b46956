/* ncamaps.h — C interface to the ncamaps dynamical-map simulator.
 *
 * Every fallible call returns an ncm_status; on failure ncm_last_error()
 * returns a message for the calling thread, valid until its next ncamaps call.
 * Handles are opaque and must be released with the matching *_free function.
 * Strings returned by accessors are owned by the handle.
 *
 * Units: times in 2π/ω_c, energies in ω_c.
 */
#ifndef NCAMAPS_H
#define NCAMAPS_H

#include <stddef.h>

#if defined(NCAMAPS_BUILDING_LIBRARY)
#define NCM_API __attribute__((visibility("default")))
#else
#define NCM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncm_status {
    NCM_OK = 0,
    NCM_ERR_INVALID_ARGUMENT = 1, /* null handle, bad enum, out-of-range index */
    NCM_ERR_CONFIG = 2,           /* unknown key, type error, constraint violation */
    NCM_ERR_IO = 3,               /* output directory or file could not be written */
    NCM_ERR_NUMERICAL = 4,        /* solver could not produce a result */
    NCM_ERR_INTERNAL = 5
} ncm_status;

typedef enum ncm_method {
    NCM_METHOD_NCA = 0,
    NCM_METHOD_NCA_MARKOV = 1,
    NCM_METHOD_BORN = 2,
    NCM_METHOD_BORN_MARKOV = 3
} ncm_method;

typedef enum ncm_solve_status {
    NCM_SOLVE_COMPLETED = 0,
    NCM_SOLVE_DIVERGED = 1,
    NCM_SOLVE_NOT_CONVERGED = 2
} ncm_solve_status;

typedef struct ncm_config ncm_config;
typedef struct ncm_manifest ncm_manifest;
typedef struct ncm_trajectory ncm_trajectory;

NCM_API const char* ncm_version(void);
NCM_API const char* ncm_last_error(void);
NCM_API const char* ncm_status_string(ncm_status status);

/* Named presets (fig2, spectra, transmission) and pipelines
 * (dynamics, steady, spectrum, transmission, convergence). */
NCM_API size_t ncm_preset_count(void);
NCM_API const char* ncm_preset_name(size_t index);
NCM_API size_t ncm_pipeline_count(void);
NCM_API const char* ncm_pipeline_name(size_t index);

/* Configuration. ncm_config_new gives the documented defaults (no alpha yet). */
NCM_API ncm_status ncm_config_new(ncm_config** out);
NCM_API ncm_status ncm_config_from_file(const char* path, ncm_config** out);
NCM_API ncm_status ncm_config_from_string(const char* text, ncm_config** out);
NCM_API ncm_status ncm_config_from_preset(const char* name, ncm_config** out);
/* Sets one key (aliases accepted, e.g. "alpha" for "bath.alpha"). */
NCM_API ncm_status ncm_config_set(ncm_config* config, const char* key, const char* value);
NCM_API ncm_status ncm_config_validate(const ncm_config* config);
/* Canonical text form. Pass buffer = NULL to query the size; *needed includes the NUL. */
NCM_API ncm_status ncm_config_to_text(const ncm_config* config, char* buffer, size_t capacity, size_t* needed);
NCM_API void ncm_config_free(ncm_config* config);

/* Runs a pipeline; workers = 0 uses all hardware threads. A manifest is
 * returned even when some sweep points diverge; check its exit code. */
NCM_API ncm_status ncm_run(const char* pipeline, const ncm_config* config, unsigned workers, ncm_manifest** out);
NCM_API int ncm_manifest_exit_code(const ncm_manifest* manifest); /* 0 full success, 2 partial */
NCM_API const char* ncm_manifest_directory(const ncm_manifest* manifest);
NCM_API const char* ncm_manifest_text(const ncm_manifest* manifest);
NCM_API size_t ncm_manifest_run_count(const ncm_manifest* manifest);
NCM_API const char* ncm_manifest_run_id(const ncm_manifest* manifest, size_t index);
NCM_API const char* ncm_manifest_run_status(const ncm_manifest* manifest, size_t index);
NCM_API size_t ncm_manifest_file_count(const ncm_manifest* manifest);
NCM_API const char* ncm_manifest_file(const ncm_manifest* manifest, size_t index);
NCM_API void ncm_manifest_free(ncm_manifest* manifest);

/* Single spin-boson solve, starting from |↓⟩⟨↓|. */
NCM_API ncm_status ncm_solve(ncm_method method, double delta, double epsilon, double alpha, double dt, double t_max,
                             ncm_trajectory** out);
NCM_API size_t ncm_trajectory_size(const ncm_trajectory* traj);
NCM_API ncm_solve_status ncm_trajectory_status(const ncm_trajectory* traj);
/* Time of the failing step when the status is not COMPLETED. */
NCM_API double ncm_trajectory_failure_time(const ncm_trajectory* traj);
/* Fills up to `capacity` samples of t, ⟨σx⟩, ⟨σz⟩ (any pointer may be NULL). */
NCM_API ncm_status ncm_trajectory_expectations(const ncm_trajectory* traj, double* t, double* sx, double* sz,
                                               size_t capacity);
NCM_API void ncm_trajectory_free(ncm_trajectory* traj);

#ifdef __cplusplus
}
#endif

#endif /* NCAMAPS_H */
