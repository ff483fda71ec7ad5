#include <chrono>
#include <cmath>

#include "resonance/error.hpp"
#include "resonance/harness.hpp"
#include "resonance/mlp.hpp"
#include "resonance/optim.hpp"
#include "resonance/parallel.hpp"
#include "resonance/tasks.hpp"

namespace resonance {

std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t cell_index, std::size_t run) {
    return derive_seed(cfg.seed, cell_index, run);
}

namespace {

// Draw order within a run is part of the reproducibility contract:
// process construction, then model/target parameters, then training.
CovariateProcess make_process(const ExperimentConfig& cfg, const Cell& cell, Rng& rng) {
    const bool bias = model_kind(cfg.experiment) == ModelKind::Linear;
    switch (mean_kind(cfg.experiment)) {
        case MeanKind::Sinusoid:
            return CovariateProcess(MeanSignal(Sinusoid{cfg.amplitude, cell.freq_or_period}), cfg.cov_scale, bias);
        case MeanKind::Ar2:
            return CovariateProcess(
                MeanSignal(Ar2{cell.freq_or_period, cfg.ar2_target_var, cfg.ar2_innovation_var}), cfg.cov_scale,
                bias);
        case MeanKind::SquareWave: {
            Vec xi(cell.dim);
            double n2 = 0.0;
            while (n2 == 0.0) {
                for (double& v : xi) v = rng.normal();
                n2 = dot(xi, xi);
            }
            const double inv = 1.0 / std::sqrt(n2);
            for (double& v : xi) v *= inv;
            return CovariateProcess(MeanSignal(SquareWave{cell.freq_or_period, xi}), cfg.cov_scale, bias);
        }
        case MeanKind::Switching:
            return CovariateProcess(MeanSignal(Switching{cell.freq_or_period, cell.variance, cell.dim}),
                                    cfg.cov_scale, bias);
    }
    fail(ErrorCode::InvalidArgument, "make_process: unknown mean kind");
}

// θ* and θ₀: Uniform[−1, 1] for the scalar sinusoid/AR(2) problems,
// N(0, 0.25 I) for the R^d problems.
Vec draw_weights(const ExperimentConfig& cfg, std::size_t n, Rng& rng) {
    Vec w(n);
    const MeanKind mk = mean_kind(cfg.experiment);
    if (mk == MeanKind::Sinusoid || mk == MeanKind::Ar2)
        for (double& v : w) v = rng.uniform(-1.0, 1.0);
    else
        for (double& v : w) v = rng.normal(0.0, 0.5);
    return w;
}

struct Outcome {
    double metric = 0.0;
    DivergenceFlag divergence;
};

template <class State, class Step>
Outcome train_linear(const ExperimentConfig& cfg, const Cell& cell, CovariateProcess& proc, const LinearTask& task,
                     State state, Step step, Rng& rng) {
    const std::size_t n = cell.samples_per_step;
    const std::uint64_t window_start = cfg.steps - cfg.window;
    Vec labels(n);
    double acc = 0.0;
    for (std::uint64_t k = 0; k < cfg.steps; ++k) {
        const Mat x = proc.sample(k, n, rng);
        for (std::size_t i = 0; i < n; ++i) labels[i] = label(task, x.data().subspan(i * x.cols(), x.cols()), rng);
        const Vec g = mse_grad(state.theta, x, labels);
        state = step(std::move(state), g);
        if (state.divergence.diverged) return {kMetricCap, state.divergence};
        if (k >= window_start) acc += distance_to_target(state.theta, task.theta_star);
    }
    return {acc / static_cast<double>(cfg.window), state.divergence};
}

Outcome run_linear(const ExperimentConfig& cfg, const Cell& cell, Rng& rng) {
    CovariateProcess proc = make_process(cfg, cell, rng);
    LinearTask task;
    task.theta_star = draw_weights(cfg, proc.sample_dim(), rng);
    task.noise_var = cfg.noise_var;
    Vec theta0 = draw_weights(cfg, proc.sample_dim(), rng);

    if (optimizer_kind(cfg.experiment) == OptimizerKind::Adam) {
        auto st = AdamState::start(std::move(theta0), cell.eta, cell.beta1, cfg.beta2, cfg.eps_hat);
        return train_linear(cfg, cell, proc, task, std::move(st),
                            [](AdamState s, const Vec& g) { return adam_step(std::move(s), g); }, rng);
    }
    auto st = SgdmState::start(std::move(theta0), cell.eta, cell.mu);
    return train_linear(cfg, cell, proc, task, std::move(st),
                        [](SgdmState s, const Vec& g) { return sgdm_step(std::move(s), g); }, rng);
}

// Test inputs follow the stationary law of the covariate process:
// N(0, (v + c) I) while the mean switches, N(0, c I) when it is constant.
Outcome run_mlp(const ExperimentConfig& cfg, const Cell& cell, Rng& rng) {
    CovariateProcess proc = make_process(cfg, cell, rng);
    const std::size_t d = proc.sample_dim();
    MlpParams net = he_init(d, rng);
    const NonlinearTask task{cfg.noise_var};

    const double test_var = cfg.cov_scale + (proc.mean().is_constant_zero() ? 0.0 : cell.variance);
    const double test_sd = std::sqrt(test_var);
    Mat test_x(cfg.test_points, d);
    for (double& v : test_x.data()) v = rng.normal(0.0, test_sd);
    Vec test_y(cfg.test_points);
    for (std::size_t i = 0; i < cfg.test_points; ++i) test_y[i] = target(task, test_x.data().subspan(i * d, d));

    SgdmState st = SgdmState::start(Vec(net.flat().begin(), net.flat().end()), cell.eta, cell.mu);
    const std::size_t n = cell.samples_per_step;
    const std::uint64_t window_start = cfg.steps - cfg.window;
    Vec labels(n);
    double acc = 0.0;
    std::uint64_t evaluated = 0;
    auto load = [&net](const Vec& theta) { std::copy(theta.begin(), theta.end(), net.flat().begin()); };

    for (std::uint64_t k = 0; k < cfg.steps; ++k) {
        const Mat x = proc.sample(k, n, rng);
        for (std::size_t i = 0; i < n; ++i) labels[i] = label(task, x.data().subspan(i * d, d), rng);
        load(st.theta);
        const Vec g = grad(net, x, labels);
        st = sgdm_step(std::move(st), g);
        if (st.divergence.diverged) return {kMetricCap, st.divergence};
        if (k >= window_start && (k - window_start) % cfg.test_every == 0) {
            load(st.theta);
            const double loss = mse_loss(net, test_x, test_y);
            if (!std::isfinite(loss)) return {kMetricCap, {true, k}};
            acc += loss;
            ++evaluated;
        }
    }
    return {acc / static_cast<double>(evaluated), st.divergence};
}

}  // namespace

RunRecord run_cell(const ExperimentConfig& cfg, const Cell& cell, std::size_t run) {
    RunRecord rec;
    rec.experiment = cfg.experiment;
    rec.cell = cell;
    rec.run = run;
    rec.seed = run_seed(cfg, cell.index, run);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Rng rng(rec.seed);
        const Outcome out =
            model_kind(cfg.experiment) == ModelKind::Mlp ? run_mlp(cfg, cell, rng) : run_linear(cfg, cell, rng);
        rec.diverged = out.divergence.diverged;
        rec.diverge_step = out.divergence.step;
        rec.metric = rec.diverged ? kMetricCap : out.metric;
    } catch (const std::exception& e) {
        rec.metric = std::nan("");
        rec.error = e.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<RunRecord> sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<Cell> cells = enumerate_cells(cfg);
    std::vector<RunRecord> records(cells.size() * cfg.runs);
    parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
        records[i] = run_cell(cfg, cells[i / cfg.runs], i % cfg.runs);
    });
    return records;
}

std::vector<CellSummary> summarize(const std::vector<RunRecord>& records) {
    std::vector<CellSummary> out;
    for (const RunRecord& r : records) {
        if (out.empty() || out.back().cell.index != r.cell.index) {
            CellSummary s;
            s.cell = r.cell;
            out.push_back(s);
        }
        CellSummary& s = out.back();
        s.mean_metric += r.metric;
        s.max_metric = s.runs == 0 ? r.metric : std::max(s.max_metric, r.metric);
        ++s.runs;
        if (r.diverged) ++s.diverged;
    }
    for (CellSummary& s : out) s.mean_metric /= static_cast<double>(s.runs);
    return out;
}

Vec process_series(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t steps, bool sampled) {
    Rng rng(run_seed(cfg, cell.index, 0));
    CovariateProcess proc = make_process(cfg, cell, rng);
    Vec out(steps);
    for (std::uint64_t k = 0; k < steps; ++k) out[k] = sampled ? proc.sample(k, 1, rng)(0, 0) : proc.mean().mean_at(k, rng)[0];
    return out;
}

}  // namespace resonance
