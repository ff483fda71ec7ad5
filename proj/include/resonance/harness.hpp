#pragma once

// Experiment configuration, execution and aggregation for the covariate-shift
// sweeps. A config expands into a Cartesian product of cells; every cell runs
// `runs` seeds, each with its own RNG derived from (seed, cell, run).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resonance/floquet.hpp"
#include "resonance/grid.hpp"
#include "resonance/optim.hpp"

namespace resonance {

enum class ExperimentId {
    Exp1,          // sinusoidal mean, linear regression, SGDm
    Exp2,          // AR(2) mean
    Exp3,          // square wave in R^d, samples-per-step ablation
    Exp4,          // stochastic switching mean
    Exp5,          // switching mean, ADAM
    Exp6,          // switching mean, ReLU network
    A2Momentum,    // Exp4 peak configuration at decreasing μ
    A2StepSize,    // Exp1 at decreasing η
    A3Stochastic,  // Exp1 with one sample per step
};

std::string_view to_string(ExperimentId id);
ExperimentId parse_experiment(std::string_view name);

enum class MeanKind { Sinusoid, Ar2, SquareWave, Switching };
enum class ModelKind { Linear, Mlp };
enum class OptimizerKind { Sgdm, Adam };

MeanKind mean_kind(ExperimentId id);
ModelKind model_kind(ExperimentId id);
OptimizerKind optimizer_kind(ExperimentId id);
/// The swept frequency axis is f (cycles/step) for sinusoid/AR(2), T (steps) otherwise.
const char* axis_name(ExperimentId id);

struct ExperimentConfig {
    ExperimentId experiment = ExperimentId::Exp1;

    // Sweep axes; every cell is one element of their Cartesian product.
    std::vector<double> mu;
    std::vector<double> eta;
    std::vector<double> freq_or_period;
    std::vector<double> variance;  // switching variance v
    std::vector<std::size_t> dim;
    std::vector<std::size_t> samples_per_step;
    std::vector<double> beta1;

    // Fixed parameters.
    double amplitude = 0.5;
    double cov_scale = 1.0;
    double ar2_target_var = 0.1;
    double ar2_innovation_var = 1e-5;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
    double noise_var = 0.0;
    std::uint64_t steps = 10000;
    std::uint64_t window = 500;
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0 = hardware concurrency
    std::size_t test_points = 2048;
    std::size_t test_every = 1;
    double h_ode = 0.0;  // 0 = per-cell default
    double marginal_band = kDefaultMarginalBand;
    double pgm_lo = -2.0;
    double pgm_hi = 6.0;
    std::string out_dir = "out";

    std::size_t cell_count() const;
    void validate() const;
};

/// Default sweep for each experiment.
ExperimentConfig default_config(ExperimentId id);

/// Parses a JSON document over the defaults of its "experiment" field.
/// Axis fields accept a number, an array, or an "a:b:n" range string
/// (also via the "<axis>_range" key).
ExperimentConfig config_from_json(std::string_view json_text);
std::string config_to_json(const ExperimentConfig& cfg);

struct Cell {
    std::size_t index = 0;
    double mu = 0.0;
    double eta = 0.0;
    double freq_or_period = 0.0;
    double variance = 0.0;
    std::size_t dim = 1;
    std::size_t samples_per_step = 1;
    double beta1 = 0.0;
};

/// Cells in canonical order: mu, eta, freq_or_period, variance, dim,
/// samples_per_step, beta1 (last varies fastest).
std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg);

inline constexpr double kMetricCap = kDivergenceNorm;

struct RunRecord {
    ExperimentId experiment = ExperimentId::Exp1;
    Cell cell;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double metric = 0.0;  // window-mean ‖θ − θ*‖, or window-mean test loss (Exp6)
    bool diverged = false;
    std::uint64_t diverge_step = 0;
    double wall_seconds = 0.0;
    std::string error;  // non-empty if the run failed internally
};

std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t cell_index, std::size_t run);

/// One run; never throws for numerical trouble (recorded in the result).
RunRecord run_cell(const ExperimentConfig& cfg, const Cell& cell, std::size_t run);

/// All cells × runs, ordered by (cell, run) regardless of worker count.
std::vector<RunRecord> sweep(const ExperimentConfig& cfg);

struct CellSummary {
    Cell cell;
    double mean_metric = 0.0;  // arithmetic mean of capped metrics
    double max_metric = 0.0;
    std::size_t runs = 0;
    std::size_t diverged = 0;
};

std::vector<CellSummary> summarize(const std::vector<RunRecord>& records);

/// Per-cell seed-mean metric over (μ, freq_or_period); all other axes must be
/// singletons.
HeatmapGrid empirical_heatmap(const ExperimentConfig& cfg, std::vector<RunRecord>* records_out = nullptr);
HeatmapGrid heatmap_from_records(const ExperimentConfig& cfg, const std::vector<RunRecord>& records);

/// Theory ρ grid on the config's (μ, f or T) axes for the given η.
/// Deterministic means only (Exp1-style sinusoid; Exp2 uses the sinusoid of
/// the same frequency and amplitude).
HeatmapGrid theory_heatmap_for(const ExperimentConfig& cfg, double eta);

// --- contours -------------------------------------------------------------

struct Contour {
    double level = 1.0;
    bool closed = false;
    std::vector<std::pair<double, double>> points;  // (row-axis value, col-axis value)
};

/// Marching squares over the grid nodes; segments are chained into
/// polylines, closed where they loop.
std::vector<Contour> extract_contours(const HeatmapGrid& grid, double level);

/// ρ = 1 contour (plus extra levels) of `theory` for overlay on `empirical`.
std::vector<Contour> theory_overlay(const HeatmapGrid& empirical, const HeatmapGrid& theory,
                                    const std::vector<double>& extra_levels = {});

struct AgreementReport {
    std::size_t diverge_cells = 0;      // theory ρ > diverge_rho
    std::size_t diverge_agree = 0;      // ... whose runs all diverged
    std::size_t converge_cells = 0;     // theory ρ < converge_rho
    std::size_t converge_agree = 0;     // ... whose runs all ended with metric < converge_metric
    std::size_t empirical_diverged = 0;           // all runs diverged, theory outside the marginal band
    std::size_t empirical_diverged_enclosed = 0;  // ... and inside the ρ = 1 contour
    double diverge_fraction() const { return diverge_cells ? double(diverge_agree) / diverge_cells : 1.0; }
    double converge_fraction() const { return converge_cells ? double(converge_agree) / converge_cells : 1.0; }
    double enclosed_fraction() const {
        return empirical_diverged ? double(empirical_diverged_enclosed) / empirical_diverged : 1.0;
    }
};

AgreementReport score_agreement(const HeatmapGrid& theory, const ExperimentConfig& cfg,
                                const std::vector<RunRecord>& records, double diverge_rho, double converge_rho,
                                double converge_metric = 1.0);

// --- serialization ----------------------------------------------------------

inline constexpr const char* kRecordsHeader =
    "experiment,mu,eta,freq_or_period,variance,dim,samples_per_step,beta1,seed,metric,diverged,diverge_step";

std::string format_double(double v);  // shortest form that round-trips

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path);
void write_summary_csv(const std::vector<CellSummary>& summary, const std::string& path);
void write_grid_csv(const HeatmapGrid& grid, const std::string& path);
HeatmapGrid read_grid_csv(const std::string& path);
void write_contours_csv(const std::vector<Contour>& contours, const HeatmapGrid& axes, const std::string& path);
void write_psd_csv(const std::vector<PsdPoint>& psd, const std::string& path);

/// 8-bit binary PGM (P5); pixel = clamp(round(255·(log10(v) − lo)/(hi − lo))).
/// Row 0 corresponds to the first row-axis value.
std::string render_pgm(const HeatmapGrid& grid, double lo_log10 = -2.0, double hi_log10 = 6.0);
void write_file(const std::string& path, std::string_view bytes);

// --- process series (for PSD inspection) -----------------------------------

/// First coordinate of the mean (sampled = false) or of X_k (sampled = true)
/// over `steps` steps for one cell of the config.
Vec process_series(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t steps, bool sampled);

}  // namespace resonance
