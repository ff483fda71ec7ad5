/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "resonance/resonance.h"

static int failures = 0;

#define EXPECT(cond)                                                     \
    do {                                                                 \
        if (!(cond)) {                                                   \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                  \
        }                                                                \
    } while (0)

static void count_checks(const char* name, int passed, const char* detail, double seconds, void* user) {
    (void)name;
    (void)detail;
    (void)seconds;
    (void)passed;
    ++*(int*)user;
}

int main(int argc, char** argv) {
    const char* dir = argc > 1 ? argv[1] : ".";
    char path[4096];

    EXPECT(strcmp(rsn_version(), "0.1.0") == 0);
    EXPECT(strcmp(rsn_status_string(RSN_ERR_IO), "i/o error") == 0);

    /* Error reporting. */
    rsn_config* cfg = NULL;
    EXPECT(rsn_config_default("nope", &cfg) == RSN_ERR_INVALID_ARGUMENT);
    EXPECT(cfg == NULL);
    EXPECT(strlen(rsn_last_error()) > 0);
    EXPECT(rsn_config_default(NULL, &cfg) == RSN_ERR_NULL_POINTER);
    EXPECT(rsn_config_from_json("{\"experiment\": \"exp1\", \"junk\": 1}", &cfg) == RSN_ERR_INVALID_ARGUMENT);

    /* Config round trip. */
    EXPECT(rsn_config_from_json("{\"experiment\": \"a2_stepsize\", \"mu\": \"0.95:0.999:4\", "
                                "\"freq\": \"0.01:0.05:5\", \"runs\": 1, \"steps\": 1000, \"window\": 100}",
                                &cfg) == RSN_OK);
    size_t needed = 0;
    EXPECT(rsn_config_to_json(cfg, NULL, 0, &needed) == RSN_OK);
    EXPECT(needed > 10);
    char* json = malloc(needed);
    EXPECT(rsn_config_to_json(cfg, json, 4, &needed) == RSN_ERR_INVALID_ARGUMENT);
    EXPECT(rsn_config_to_json(cfg, json, needed, &needed) == RSN_OK);
    EXPECT(strstr(json, "a2_stepsize") != NULL);
    free(json);
    size_t etas = 0;
    double eta = 0.0;
    EXPECT(rsn_config_eta_count(cfg, &etas) == RSN_OK);
    EXPECT(etas == 3);
    EXPECT(rsn_config_eta(cfg, 2, &eta) == RSN_OK && eta == 0.001);
    EXPECT(rsn_config_eta(cfg, 3, &eta) == RSN_ERR_INVALID_ARGUMENT);

    /* Stability of a single cell: constant mean gives the expm value, and
     * the classification is consistent with rho. */
    double rho = 0.0;
    rsn_stability cls;
    EXPECT(rsn_sinusoid_stability(0.999, 0.01, 0.045, 0.5, 1.0, 0.0, &rho, &cls) == RSN_OK);
    EXPECT(rho > 1.02 && cls == RSN_DIVERGES);
    EXPECT(rsn_sinusoid_stability(0.9, 0.01, 0.02, 0.5, 1.0, 0.0, &rho, &cls) == RSN_OK);
    EXPECT(rho < 0.98 && cls == RSN_CONVERGES);
    EXPECT(rsn_sinusoid_stability(0.9, -1.0, 0.02, 0.5, 1.0, 0.0, &rho, &cls) == RSN_ERR_INVALID_ARGUMENT);

    /* Theory grid, contours, image, CSV round trip. */
    rsn_grid* theory = NULL;
    EXPECT(rsn_theory_heatmap(cfg, 0, &theory) == RSN_OK);
    EXPECT(rsn_grid_rows(theory) == 4 && rsn_grid_cols(theory) == 5);
    EXPECT(rsn_grid_failure_count(theory) == 0);
    double v = 0.0, axis = 0.0;
    EXPECT(rsn_grid_value(theory, 3, 4, &v) == RSN_OK && v > 1.0);
    EXPECT(rsn_grid_row_value(theory, 3, &axis) == RSN_OK && axis == 0.999);
    EXPECT(rsn_grid_col_value(theory, 0, &axis) == RSN_OK && axis == 0.01);
    EXPECT(rsn_grid_value(theory, 4, 0, &v) == RSN_ERR_INVALID_ARGUMENT);

    rsn_contours* cs = NULL;
    EXPECT(rsn_theory_overlay(theory, theory, &cs) == RSN_OK);
    EXPECT(rsn_contours_count(cs) >= 1);
    EXPECT(rsn_contour_points(cs, 0) >= 2);
    snprintf(path, sizeof path, "%s/contour.csv", dir);
    EXPECT(rsn_contours_write_csv(cs, theory, path) == RSN_OK);
    rsn_contours_free(cs);

    snprintf(path, sizeof path, "%s/theory.pgm", dir);
    EXPECT(rsn_grid_write_pgm(theory, -2.0, 6.0, path) == RSN_OK);
    snprintf(path, sizeof path, "%s/theory.csv", dir);
    EXPECT(rsn_grid_write_csv(theory, path) == RSN_OK);
    rsn_grid* back = NULL;
    EXPECT(rsn_grid_read_csv(path, &back) == RSN_OK);
    double a = 0.0, b = 0.0;
    EXPECT(rsn_grid_value(theory, 2, 3, &a) == RSN_OK && rsn_grid_value(back, 2, 3, &b) == RSN_OK && a == b);
    rsn_grid_free(back);
    EXPECT(rsn_grid_read_csv("/nonexistent/grid.csv", &back) == RSN_ERR_IO);
    EXPECT(strstr(rsn_last_error(), "/nonexistent/grid.csv") != NULL);

    /* Empirical sweep over a small grid. */
    rsn_grid* emp = NULL;
    rsn_records* recs = NULL;
    rsn_config_free(cfg);
    EXPECT(rsn_config_from_json("{\"experiment\": \"exp1\", \"mu\": [0.9, 0.95], \"freq\": [0, 0.02], "
                                "\"runs\": 2, \"steps\": 1000, \"window\": 100, \"workers\": 2}",
                                &cfg) == RSN_OK);
    EXPECT(rsn_empirical_heatmap(cfg, &emp, &recs) == RSN_OK);
    EXPECT(rsn_records_count(recs) == 8);
    rsn_run_record r;
    EXPECT(rsn_records_get(recs, 7, &r) == RSN_OK);
    EXPECT(strcmp(r.experiment, "exp1") == 0 && r.cell_index == 3 && r.run == 1);
    EXPECT(isfinite(r.metric) && !r.diverged);
    EXPECT(rsn_records_get(recs, 8, &r) == RSN_ERR_INVALID_ARGUMENT);
    snprintf(path, sizeof path, "%s/records.csv", dir);
    EXPECT(rsn_records_write_csv(recs, path) == RSN_OK);
    snprintf(path, sizeof path, "%s/summary.csv", dir);
    EXPECT(rsn_records_write_summary_csv(recs, path) == RSN_OK);
    EXPECT(rsn_theory_overlay(emp, theory, &cs) == RSN_ERR_INVALID_ARGUMENT);
    rsn_records_free(recs);
    rsn_grid_free(emp);
    rsn_grid_free(theory);

    /* Spectrum of the configured mean. */
    double series[4096];
    EXPECT(rsn_process_series(cfg, 1, 4096, 0, series) == RSN_OK);
    size_t bins = 0;
    EXPECT(rsn_psd(series, 4096, 512, 0.5, NULL, NULL, 0, &bins) == RSN_OK && bins == 257);
    double freq[257], power[257];
    EXPECT(rsn_psd(series, 4096, 512, 0.5, freq, power, 257, &bins) == RSN_OK);
    size_t peak = 0;
    for (size_t i = 1; i < bins; ++i)
        if (power[i] > power[peak]) peak = i;
    EXPECT(fabs(freq[peak] - 0.02) < 2.0 / 512);
    snprintf(path, sizeof path, "%s/psd.csv", dir);
    EXPECT(rsn_psd_write_csv(freq, power, bins, path) == RSN_OK);
    rsn_config_free(cfg);

    /* Built-in oracle suite. */
    int seen = 0;
    size_t failed = 99;
    EXPECT(rsn_verify(0, 1, count_checks, &seen, &failed) == RSN_OK);
    EXPECT(seen >= 8 && failed == 0);

    /* NULL handles are tolerated by the free functions and count accessors. */
    rsn_config_free(NULL);
    rsn_grid_free(NULL);
    EXPECT(rsn_records_count(NULL) == 0);

    if (failures) fprintf(stderr, "%d expectation(s) failed\n", failures);
    return failures ? 1 : 0;
}
