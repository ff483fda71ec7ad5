#include "resonance/resonance.h"

#include <cstring>
#include <new>
#include <string>

#include "resonance/error.hpp"
#include "resonance/floquet.hpp"
#include "resonance/harness.hpp"
#include "resonance/verify.hpp"

using namespace resonance;

struct rsn_config {
    ExperimentConfig cfg;
};
struct rsn_grid {
    HeatmapGrid grid;
};
struct rsn_records {
    std::vector<RunRecord> records;
    std::vector<std::string> names;  // experiment names backing rsn_run_record::experiment
};
struct rsn_contours {
    std::vector<Contour> contours;
};

namespace {

thread_local std::string g_last_error;

rsn_status set_error(rsn_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

rsn_status map_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return RSN_ERR_INVALID_ARGUMENT;
        case ErrorCode::NotConverged: return RSN_ERR_NOT_CONVERGED;
        case ErrorCode::Diverged: return RSN_ERR_DIVERGED;
        case ErrorCode::Io: return RSN_ERR_IO;
    }
    return RSN_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes at the ABI boundary.
template <class Fn>
rsn_status guarded(Fn&& fn) {
    g_last_error.clear();
    try {
        fn();
        return RSN_OK;
    } catch (const Error& e) {
        return set_error(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(RSN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(RSN_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(RSN_ERR_INTERNAL, "unknown exception");
    }
}

#define RSN_NONNULL(p)                                                      \
    do {                                                                    \
        if (!(p)) return set_error(RSN_ERR_NULL_POINTER, #p " is NULL");    \
    } while (0)

rsn_records* wrap_records(std::vector<RunRecord> recs) {
    auto* h = new rsn_records{std::move(recs), {}};
    for (const RunRecord& r : h->records) h->names.emplace_back(to_string(r.experiment));
    return h;
}

}  // namespace

extern "C" {

const char* rsn_version(void) { return "0.1.0"; }

const char* rsn_last_error(void) { return g_last_error.c_str(); }

const char* rsn_status_string(rsn_status s) {
    switch (s) {
        case RSN_OK: return "ok";
        case RSN_ERR_INVALID_ARGUMENT: return "invalid argument";
        case RSN_ERR_NOT_CONVERGED: return "not converged";
        case RSN_ERR_DIVERGED: return "diverged";
        case RSN_ERR_IO: return "i/o error";
        case RSN_ERR_NULL_POINTER: return "null pointer";
        case RSN_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

rsn_status rsn_config_from_json(const char* json, rsn_config** out) {
    RSN_NONNULL(json);
    RSN_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new rsn_config{config_from_json(json)}; });
}

rsn_status rsn_config_default(const char* experiment, rsn_config** out) {
    RSN_NONNULL(experiment);
    RSN_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new rsn_config{default_config(parse_experiment(experiment))}; });
}

rsn_status rsn_config_to_json(const rsn_config* cfg, char* buf, size_t cap, size_t* needed) {
    RSN_NONNULL(cfg);
    std::string text;
    const rsn_status s = guarded([&] { text = config_to_json(cfg->cfg); });
    if (s != RSN_OK) return s;
    if (needed) *needed = text.size() + 1;
    if (!buf) return RSN_OK;
    if (cap < text.size() + 1) return set_error(RSN_ERR_INVALID_ARGUMENT, "rsn_config_to_json: buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return RSN_OK;
}

rsn_status rsn_config_out_dir(const rsn_config* cfg, const char** out) {
    RSN_NONNULL(cfg);
    RSN_NONNULL(out);
    *out = cfg->cfg.out_dir.c_str();
    return RSN_OK;
}

rsn_status rsn_config_eta_count(const rsn_config* cfg, size_t* out) {
    RSN_NONNULL(cfg);
    RSN_NONNULL(out);
    *out = cfg->cfg.eta.size();
    return RSN_OK;
}

rsn_status rsn_config_eta(const rsn_config* cfg, size_t index, double* out) {
    RSN_NONNULL(cfg);
    RSN_NONNULL(out);
    if (index >= cfg->cfg.eta.size()) return set_error(RSN_ERR_INVALID_ARGUMENT, "eta index out of range");
    *out = cfg->cfg.eta[index];
    return RSN_OK;
}

void rsn_config_free(rsn_config* cfg) { delete cfg; }

rsn_status rsn_sinusoid_stability(double mu, double eta, double freq, double amplitude, double cov_scale,
                                  double h_ode, double* rho, rsn_stability* cls) {
    RSN_NONNULL(rho);
    return guarded([&] {
        require(mu >= 0.0 && mu < 1.0, "mu must lie in [0, 1)");
        require(freq >= 0.0 && freq < 0.5, "freq must lie in [0, 0.5)");
        const CovariateProcess proc(MeanSignal(Sinusoid{amplitude, freq}), cov_scale, true);
        *rho = theory_rho(proc, mu, eta, h_ode);
        if (cls) {
            switch (classify(*rho)) {
                case StabilityClass::Converges: *cls = RSN_CONVERGES; break;
                case StabilityClass::Marginal: *cls = RSN_MARGINAL; break;
                case StabilityClass::Diverges: *cls = RSN_DIVERGES; break;
            }
        }
    });
}

rsn_status rsn_theory_heatmap(const rsn_config* cfg, size_t eta_index, rsn_grid** out) {
    RSN_NONNULL(cfg);
    RSN_NONNULL(out);
    *out = nullptr;
    if (eta_index >= cfg->cfg.eta.size()) return set_error(RSN_ERR_INVALID_ARGUMENT, "eta index out of range");
    return guarded([&] { *out = new rsn_grid{theory_heatmap_for(cfg->cfg, cfg->cfg.eta[eta_index])}; });
}

rsn_status rsn_sweep(const rsn_config* cfg, rsn_records** out) {
    RSN_NONNULL(cfg);
    RSN_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = wrap_records(sweep(cfg->cfg)); });
}

rsn_status rsn_empirical_heatmap(const rsn_config* cfg, rsn_grid** grid_out, rsn_records** records_out) {
    RSN_NONNULL(cfg);
    RSN_NONNULL(grid_out);
    *grid_out = nullptr;
    if (records_out) *records_out = nullptr;
    return guarded([&] {
        std::vector<RunRecord> recs;
        auto* g = new rsn_grid{empirical_heatmap(cfg->cfg, &recs)};
        *grid_out = g;
        if (records_out) *records_out = wrap_records(std::move(recs));
    });
}

size_t rsn_records_count(const rsn_records* records) { return records ? records->records.size() : 0; }

rsn_status rsn_records_get(const rsn_records* records, size_t index, rsn_run_record* out) {
    RSN_NONNULL(records);
    RSN_NONNULL(out);
    if (index >= records->records.size()) return set_error(RSN_ERR_INVALID_ARGUMENT, "record index out of range");
    const RunRecord& r = records->records[index];
    out->experiment = records->names[index].c_str();
    out->mu = r.cell.mu;
    out->eta = r.cell.eta;
    out->freq_or_period = r.cell.freq_or_period;
    out->variance = r.cell.variance;
    out->dim = r.cell.dim;
    out->samples_per_step = r.cell.samples_per_step;
    out->beta1 = r.cell.beta1;
    out->cell_index = r.cell.index;
    out->run = r.run;
    out->seed = r.seed;
    out->metric = r.metric;
    out->diverged = r.diverged ? 1 : 0;
    out->diverge_step = r.diverge_step;
    out->wall_seconds = r.wall_seconds;
    return RSN_OK;
}

rsn_status rsn_records_write_csv(const rsn_records* records, const char* path) {
    RSN_NONNULL(records);
    RSN_NONNULL(path);
    return guarded([&] { write_records_csv(records->records, path); });
}

rsn_status rsn_records_write_summary_csv(const rsn_records* records, const char* path) {
    RSN_NONNULL(records);
    RSN_NONNULL(path);
    return guarded([&] { write_summary_csv(summarize(records->records), path); });
}

void rsn_records_free(rsn_records* records) { delete records; }

size_t rsn_grid_rows(const rsn_grid* grid) { return grid ? grid->grid.rows() : 0; }
size_t rsn_grid_cols(const rsn_grid* grid) { return grid ? grid->grid.cols() : 0; }

rsn_status rsn_grid_value(const rsn_grid* grid, size_t row, size_t col, double* out) {
    RSN_NONNULL(grid);
    RSN_NONNULL(out);
    if (row >= grid->grid.rows() || col >= grid->grid.cols())
        return set_error(RSN_ERR_INVALID_ARGUMENT, "grid index out of range");
    *out = grid->grid.at(row, col);
    return RSN_OK;
}

rsn_status rsn_grid_row_value(const rsn_grid* grid, size_t row, double* out) {
    RSN_NONNULL(grid);
    RSN_NONNULL(out);
    if (row >= grid->grid.rows()) return set_error(RSN_ERR_INVALID_ARGUMENT, "row index out of range");
    *out = grid->grid.row_values[row];
    return RSN_OK;
}

rsn_status rsn_grid_col_value(const rsn_grid* grid, size_t col, double* out) {
    RSN_NONNULL(grid);
    RSN_NONNULL(out);
    if (col >= grid->grid.cols()) return set_error(RSN_ERR_INVALID_ARGUMENT, "column index out of range");
    *out = grid->grid.col_values[col];
    return RSN_OK;
}

size_t rsn_grid_failure_count(const rsn_grid* grid) { return grid ? grid->grid.failures.size() : 0; }

rsn_status rsn_grid_write_csv(const rsn_grid* grid, const char* path) {
    RSN_NONNULL(grid);
    RSN_NONNULL(path);
    return guarded([&] { write_grid_csv(grid->grid, path); });
}

rsn_status rsn_grid_read_csv(const char* path, rsn_grid** out) {
    RSN_NONNULL(path);
    RSN_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new rsn_grid{read_grid_csv(path)}; });
}

rsn_status rsn_grid_write_pgm(const rsn_grid* grid, double lo_log10, double hi_log10, const char* path) {
    RSN_NONNULL(grid);
    RSN_NONNULL(path);
    return guarded([&] { write_file(path, render_pgm(grid->grid, lo_log10, hi_log10)); });
}

void rsn_grid_free(rsn_grid* grid) { delete grid; }

rsn_status rsn_contours_extract(const rsn_grid* grid, double level, rsn_contours** out) {
    RSN_NONNULL(grid);
    RSN_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new rsn_contours{extract_contours(grid->grid, level)}; });
}

rsn_status rsn_theory_overlay(const rsn_grid* empirical, const rsn_grid* theory, rsn_contours** out) {
    RSN_NONNULL(empirical);
    RSN_NONNULL(theory);
    RSN_NONNULL(out);
    *out = nullptr;
    return guarded([&] { *out = new rsn_contours{theory_overlay(empirical->grid, theory->grid)}; });
}

size_t rsn_contours_count(const rsn_contours* c) { return c ? c->contours.size() : 0; }

size_t rsn_contour_points(const rsn_contours* c, size_t index) {
    return (c && index < c->contours.size()) ? c->contours[index].points.size() : 0;
}

int rsn_contour_closed(const rsn_contours* c, size_t index) {
    return (c && index < c->contours.size() && c->contours[index].closed) ? 1 : 0;
}

rsn_status rsn_contours_write_csv(const rsn_contours* contours, const rsn_grid* axes, const char* path) {
    RSN_NONNULL(contours);
    RSN_NONNULL(axes);
    RSN_NONNULL(path);
    return guarded([&] { write_contours_csv(contours->contours, axes->grid, path); });
}

void rsn_contours_free(rsn_contours* contours) { delete contours; }

rsn_status rsn_psd(const double* series, size_t n, size_t segment_len, double overlap, double* freq, double* power,
                   size_t cap, size_t* bins) {
    RSN_NONNULL(series);
    RSN_NONNULL(bins);
    return guarded([&] {
        const auto spec = psd(std::span<const double>(series, n), segment_len, overlap);
        *bins = spec.size();
        if (!freq && !power) return;
        require(freq && power, "rsn_psd: freq and power must both be given");
        require(cap >= spec.size(), "rsn_psd: output capacity too small");
        for (std::size_t i = 0; i < spec.size(); ++i) {
            freq[i] = spec[i].freq;
            power[i] = spec[i].power;
        }
    });
}

rsn_status rsn_process_series(const rsn_config* cfg, size_t cell_index, uint64_t steps, int sampled, double* out) {
    RSN_NONNULL(cfg);
    RSN_NONNULL(out);
    return guarded([&] {
        const auto cells = enumerate_cells(cfg->cfg);
        require(cell_index < cells.size(), "rsn_process_series: cell index out of range");
        const Vec xs = process_series(cfg->cfg, cells[cell_index], steps, sampled != 0);
        std::copy(xs.begin(), xs.end(), out);
    });
}

rsn_status rsn_psd_write_csv(const double* freq, const double* power, size_t bins, const char* path) {
    RSN_NONNULL(freq);
    RSN_NONNULL(power);
    RSN_NONNULL(path);
    return guarded([&] {
        std::vector<PsdPoint> pts(bins);
        for (std::size_t i = 0; i < bins; ++i) pts[i] = {freq[i], power[i]};
        write_psd_csv(pts, path);
    });
}

rsn_status rsn_verify(int full, size_t workers, rsn_check_callback cb, void* user, size_t* failures) {
    return guarded([&] {
        std::size_t failed = 0;
        run_verify(full != 0, [&](const CheckResult& r) {
            if (!r.passed) ++failed;
            if (cb) cb(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
        }, workers);
        if (failures) *failures = failed;
    });
}

}  // extern "C"
