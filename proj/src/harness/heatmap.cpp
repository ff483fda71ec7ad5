#include <cmath>

#include "resonance/error.hpp"
#include "resonance/harness.hpp"

namespace resonance {

HeatmapGrid::HeatmapGrid(std::string row_name, std::vector<double> rows, std::string col_name,
                         std::vector<double> cols, std::string provenance_tag)
    : row_axis(std::move(row_name)),
      col_axis(std::move(col_name)),
      row_values(std::move(rows)),
      col_values(std::move(cols)),
      values(row_values.size() * col_values.size(), 0.0),
      provenance(std::move(provenance_tag)) {}

bool HeatmapGrid::same_axes(const HeatmapGrid& other) const {
    return row_axis == other.row_axis && col_axis == other.col_axis && row_values == other.row_values &&
           col_values == other.col_values;
}

namespace {

void require_two_axes(const ExperimentConfig& cfg) {
    require(cfg.eta.size() == 1 && cfg.variance.size() == 1 && cfg.dim.size() == 1 &&
                cfg.samples_per_step.size() == 1 && cfg.beta1.size() == 1,
            "heatmap: only the mu and frequency/period axes may have more than one value");
}

}  // namespace

HeatmapGrid heatmap_from_records(const ExperimentConfig& cfg, const std::vector<RunRecord>& records) {
    require_two_axes(cfg);
    HeatmapGrid grid("mu", cfg.mu, axis_name(cfg.experiment), cfg.freq_or_period, "mean_metric");
    require(records.size() == grid.values.size() * cfg.runs, "heatmap: record count does not match the grid");
    // With singleton side axes the cell index is row-major over (mu, axis).
    for (const CellSummary& s : summarize(records)) {
        grid.values[s.cell.index] = s.mean_metric;
        if (std::isnan(s.mean_metric))
            grid.failures.push_back({s.cell.index / grid.cols(), s.cell.index % grid.cols(), "run failed"});
    }
    for (const RunRecord& r : records)
        if (!r.error.empty())
            grid.failures.push_back({r.cell.index / grid.cols(), r.cell.index % grid.cols(), r.error});
    return grid;
}

HeatmapGrid empirical_heatmap(const ExperimentConfig& cfg, std::vector<RunRecord>* records_out) {
    require_two_axes(cfg);
    std::vector<RunRecord> records = sweep(cfg);
    HeatmapGrid grid = heatmap_from_records(cfg, records);
    if (records_out) *records_out = std::move(records);
    return grid;
}

HeatmapGrid theory_heatmap_for(const ExperimentConfig& cfg, double eta) {
    const MeanKind mk = mean_kind(cfg.experiment);
    require(mk != MeanKind::Switching, "theory heatmap: switching means are not periodic");
    require(cfg.dim.size() == 1, "theory heatmap: dim must be a single value");
    const std::size_t d = cfg.dim[0];
    const double amp = cfg.amplitude;
    const double c = cfg.cov_scale;
    ProcessFactory factory;
    if (mk == MeanKind::SquareWave) {
        // ρ is invariant under rotations of the direction, so e₁ stands in for
        // the per-run random direction.
        factory = [d, c](double period) {
            Vec dir(d, 0.0);
            dir[0] = 1.0;
            return CovariateProcess(MeanSignal(SquareWave{period, dir}), c, true);
        };
    } else {
        factory = [amp, c](double f) { return CovariateProcess(MeanSignal(Sinusoid{amp, f}), c, true); };
    }
    return theory_heatmap(eta, cfg.mu, cfg.freq_or_period, axis_name(cfg.experiment), factory, cfg.h_ode,
                          cfg.workers);
}

AgreementReport score_agreement(const HeatmapGrid& theory, const ExperimentConfig& cfg,
                                const std::vector<RunRecord>& records, double diverge_rho, double converge_rho,
                                double converge_metric) {
    require_two_axes(cfg);
    require(theory.row_values == cfg.mu && theory.col_values == cfg.freq_or_period,
            "score_agreement: theory grid axes differ from the config");
    AgreementReport rep;
    for (const CellSummary& s : summarize(records)) {
        const double rho = theory.values.at(s.cell.index);
        if (std::isnan(rho)) continue;
        const bool all_converged = !std::isnan(s.mean_metric) && s.max_metric < converge_metric;
        if (rho > diverge_rho) {
            ++rep.diverge_cells;
            if (s.diverged == s.runs) ++rep.diverge_agree;
        }
        if (rho < converge_rho) {
            ++rep.converge_cells;
            if (all_converged) ++rep.converge_agree;
        }
        if (s.diverged == s.runs && std::abs(rho - 1.0) > cfg.marginal_band) {
            ++rep.empirical_diverged;
            if (rho > 1.0) ++rep.empirical_diverged_enclosed;
        }
    }
    return rep;
}

}  // namespace resonance
