/* C interface to the resonance library.
 *
 * Handles are opaque and owned by the caller once returned; release each with
 * its *_free function (NULL is accepted). Every fallible call returns an
 * rsn_status; on failure rsn_last_error() describes the problem for the
 * calling thread until its next library call.
 */
#ifndef RESONANCE_H
#define RESONANCE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef RSN_BUILDING_LIBRARY
#    define RSN_API __declspec(dllexport)
#  else
#    define RSN_API __declspec(dllimport)
#  endif
#else
#  define RSN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rsn_status {
    RSN_OK = 0,
    RSN_ERR_INVALID_ARGUMENT = 1,
    RSN_ERR_NOT_CONVERGED = 2,
    RSN_ERR_DIVERGED = 3,
    RSN_ERR_IO = 4,
    RSN_ERR_NULL_POINTER = 5,
    RSN_ERR_INTERNAL = 6
} rsn_status;

typedef enum rsn_stability {
    RSN_CONVERGES = 0,
    RSN_MARGINAL = 1,
    RSN_DIVERGES = 2
} rsn_stability;

typedef struct rsn_config rsn_config;
typedef struct rsn_grid rsn_grid;
typedef struct rsn_records rsn_records;
typedef struct rsn_contours rsn_contours;

/* One run as stored in a records handle; `experiment` points into the handle. */
typedef struct rsn_run_record {
    const char* experiment;
    double mu;
    double eta;
    double freq_or_period;
    double variance;
    size_t dim;
    size_t samples_per_step;
    double beta1;
    size_t cell_index;
    size_t run;
    uint64_t seed;
    double metric;
    int diverged;
    uint64_t diverge_step;
    double wall_seconds;
} rsn_run_record;

RSN_API const char* rsn_version(void);
RSN_API const char* rsn_last_error(void);
RSN_API const char* rsn_status_string(rsn_status status);

/* --- configuration ------------------------------------------------------ */

/* Parses a JSON document (fields as in the README) over the defaults of its
 * "experiment" field. */
RSN_API rsn_status rsn_config_from_json(const char* json, rsn_config** out);
/* Defaults for an experiment name such as "exp1" or "a2_momentum". */
RSN_API rsn_status rsn_config_default(const char* experiment, rsn_config** out);
/* Writes the effective configuration as JSON. If buf is too small (or NULL)
 * only *needed (including the terminator) is set and RSN_ERR_INVALID_ARGUMENT
 * is returned for a non-NULL buf. */
RSN_API rsn_status rsn_config_to_json(const rsn_config* cfg, char* buf, size_t cap, size_t* needed);
RSN_API rsn_status rsn_config_out_dir(const rsn_config* cfg, const char** out);
RSN_API rsn_status rsn_config_eta_count(const rsn_config* cfg, size_t* out);
RSN_API rsn_status rsn_config_eta(const rsn_config* cfg, size_t index, double* out);
RSN_API void rsn_config_free(rsn_config* cfg);

/* --- stability theory --------------------------------------------------- */

/* Spectral radius of the monodromy matrix for the sinusoidal scalar+bias
 * problem; h_ode <= 0 selects the default step. */
RSN_API rsn_status rsn_sinusoid_stability(double mu, double eta, double freq, double amplitude, double cov_scale,
                                          double h_ode, double* rho, rsn_stability* cls);

/* ρ over the config's (mu, freq/period) grid at eta = the index-th eta value. */
RSN_API rsn_status rsn_theory_heatmap(const rsn_config* cfg, size_t eta_index, rsn_grid** out);

/* --- experiments -------------------------------------------------------- */

RSN_API rsn_status rsn_sweep(const rsn_config* cfg, rsn_records** out);
/* Runs the sweep and aggregates it over (mu, freq/period); records_out may be NULL. */
RSN_API rsn_status rsn_empirical_heatmap(const rsn_config* cfg, rsn_grid** grid_out, rsn_records** records_out);

RSN_API size_t rsn_records_count(const rsn_records* records);
RSN_API rsn_status rsn_records_get(const rsn_records* records, size_t index, rsn_run_record* out);
RSN_API rsn_status rsn_records_write_csv(const rsn_records* records, const char* path);
/* Per-cell aggregate: runs, diverged runs, mean and max metric. */
RSN_API rsn_status rsn_records_write_summary_csv(const rsn_records* records, const char* path);
RSN_API void rsn_records_free(rsn_records* records);

/* --- grids, contours, images -------------------------------------------- */

RSN_API size_t rsn_grid_rows(const rsn_grid* grid);
RSN_API size_t rsn_grid_cols(const rsn_grid* grid);
RSN_API rsn_status rsn_grid_value(const rsn_grid* grid, size_t row, size_t col, double* out);
RSN_API rsn_status rsn_grid_row_value(const rsn_grid* grid, size_t row, double* out);
RSN_API rsn_status rsn_grid_col_value(const rsn_grid* grid, size_t col, double* out);
RSN_API size_t rsn_grid_failure_count(const rsn_grid* grid);
RSN_API rsn_status rsn_grid_write_csv(const rsn_grid* grid, const char* path);
RSN_API rsn_status rsn_grid_read_csv(const char* path, rsn_grid** out);
/* Binary PGM with log10 scaling between lo_log10 and hi_log10. */
RSN_API rsn_status rsn_grid_write_pgm(const rsn_grid* grid, double lo_log10, double hi_log10, const char* path);
RSN_API void rsn_grid_free(rsn_grid* grid);

/* Marching-squares contours of `grid` at `level`. */
RSN_API rsn_status rsn_contours_extract(const rsn_grid* grid, double level, rsn_contours** out);
/* The rho = 1 contour of `theory`; both grids must share axes. */
RSN_API rsn_status rsn_theory_overlay(const rsn_grid* empirical, const rsn_grid* theory, rsn_contours** out);
RSN_API size_t rsn_contours_count(const rsn_contours* contours);
RSN_API size_t rsn_contour_points(const rsn_contours* contours, size_t index);
RSN_API int rsn_contour_closed(const rsn_contours* contours, size_t index);
/* Axes are taken from `axes` for the CSV header. */
RSN_API rsn_status rsn_contours_write_csv(const rsn_contours* contours, const rsn_grid* axes, const char* path);
RSN_API void rsn_contours_free(rsn_contours* contours);

/* --- spectra ------------------------------------------------------------- */

/* Welch PSD of `series`. With freq/power NULL only *bins is set. */
RSN_API rsn_status rsn_psd(const double* series, size_t n, size_t segment_len, double overlap, double* freq,
                           double* power, size_t cap, size_t* bins);
/* First coordinate of the mean (sampled = 0) or of the drawn inputs
 * (sampled != 0) for cell `cell_index` of the config. */
RSN_API rsn_status rsn_process_series(const rsn_config* cfg, size_t cell_index, uint64_t steps, int sampled,
                                      double* out);
RSN_API rsn_status rsn_psd_write_csv(const double* freq, const double* power, size_t bins, const char* path);

/* --- self-check ---------------------------------------------------------- */

typedef void (*rsn_check_callback)(const char* name, int passed, const char* detail, double seconds, void* user);

/* Runs the built-in oracle suite (full != 0 adds the slower checks) and
 * reports each result through `cb`; *failures receives the failure count. */
RSN_API rsn_status rsn_verify(int full, size_t workers, rsn_check_callback cb, void* user, size_t* failures);

#ifdef __cplusplus
}
#endif

#endif /* RESONANCE_H */
