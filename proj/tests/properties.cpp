// Sweep-level properties of the experiment suite, reported like the
// acceptance checks: one PASS/FAIL line each, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "resonance/harness.hpp"

using namespace resonance;

namespace {

struct Verdict {
    bool passed;
    std::string detail;
};

using Curve = std::map<double, double>;

Curve curve(const std::vector<CellSummary>& summary, const std::function<bool(const Cell&)>& keep) {
    Curve out;
    for (const auto& s : summary)
        if (keep(s.cell)) out[s.cell.freq_or_period] = s.mean_metric;
    return out;
}

std::pair<double, double> peak(const Curve& c) {
    return *std::max_element(c.begin(), c.end(), [](auto& a, auto& b) { return a.second < b.second; });
}

// Re-run the peak configuration at μ = 0.85; the metric at the μ = 0.95
// resonant period must fall within 2x of the T = 0 baseline.
Verdict momentum_mitigation(ExperimentConfig cfg) {
    cfg.mu = {0.85, 0.95};
    const auto summary = summarize(sweep(cfg));
    const Curve high = curve(summary, [](const Cell& c) { return c.mu == 0.95; });
    const Curve low = curve(summary, [](const Cell& c) { return c.mu == 0.85; });
    const auto [t_res, m_high] = peak(high);
    const double base = low.at(0.0), at_res = low.at(t_res);
    std::ostringstream os;
    os << "mu=0.95 peak " << m_high << " at T=" << t_res << "; mu=0.85 there " << at_res << " vs T=0 " << base;
    return {at_res <= 2.0 * base, os.str()};
}

Verdict exp3_momentum() {
    ExperimentConfig cfg = default_config(ExperimentId::Exp3);
    cfg.samples_per_step = {5};
    cfg.runs = 5;
    return momentum_mitigation(cfg);
}

Verdict exp4_momentum() {
    ExperimentConfig cfg = default_config(ExperimentId::Exp4);
    cfg.variance = {0.4};
    cfg.dim = {5};
    cfg.runs = 5;
    return momentum_mitigation(cfg);
}

Verdict exp6_momentum() {
    ExperimentConfig cfg = default_config(ExperimentId::Exp6);
    cfg.variance = {0.4};
    cfg.freq_or_period = linspace(0.0, 40.0, 9);
    cfg.runs = 5;
    return momentum_mitigation(cfg);
}

// Cells whose runs all diverged, restricted to theory cells outside the
// marginal band.
std::set<std::size_t> diverged_cells(const ExperimentConfig& cfg, const HeatmapGrid& theory) {
    std::set<std::size_t> out;
    for (const auto& s : summarize(sweep(cfg))) {
        const double rho = theory.values[s.cell.index];
        if (s.diverged == s.runs && classify(rho, cfg.marginal_band) != StabilityClass::Marginal)
            out.insert(s.cell.index);
    }
    return out;
}

Verdict stochastic_damping() {
    ExperimentConfig cfg = default_config(ExperimentId::A3Stochastic);
    cfg.mu = linspace(0.95, 0.999, 20);
    cfg.freq_or_period = linspace(0.001, 0.05, 20);
    cfg.runs = 3;
    const HeatmapGrid theory = theory_heatmap_for(cfg, cfg.eta.front());
    const auto single = diverged_cells(cfg, theory);
    cfg.samples_per_step = {20};
    const auto batch = diverged_cells(cfg, theory);
    std::size_t outside = 0;
    for (std::size_t c : single) outside += !batch.count(c);
    std::ostringstream os;
    os << "diverged cells n=1: " << single.size() << ", n=20: " << batch.size() << ", n=1 cells not in n=20: "
       << outside;
    return {outside == 0 && single.size() < batch.size(), os.str()};
}

// Peak of the seed-mean metric over T for each value of one Exp4 axis.
Verdict exp4_monotone(bool over_dim) {
    ExperimentConfig cfg = default_config(ExperimentId::Exp4);
    cfg.runs = 5;
    if (over_dim) {
        cfg.variance = {0.4};
        cfg.dim = {1, 5, 9};
    } else {
        cfg.variance = {0.1, 0.25, 0.4};
        cfg.dim = {5};
    }
    const auto summary = summarize(sweep(cfg));
    std::vector<double> peaks;
    std::ostringstream os;
    os << (over_dim ? "peak by d {1,5,9}:" : "peak by v {0.1,0.25,0.4}:");
    const std::size_t n = 3;
    for (std::size_t i = 0; i < n; ++i) {
        const Curve c = curve(summary, [&](const Cell& cell) {
            return over_dim ? cell.dim == cfg.dim[i] : cell.variance == cfg.variance[i];
        });
        peaks.push_back(peak(c).second);
        os << ' ' << peaks.back();
    }
    return {std::is_sorted(peaks.begin(), peaks.end()), os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> props{
        {"Exp3 momentum mitigation at mu=0.85", exp3_momentum},
        {"Exp4 momentum mitigation at mu=0.85", exp4_momentum},
        {"Exp6 momentum mitigation at mu=0.85", exp6_momentum},
        {"single-sample runs diverge on a strict subset", stochastic_damping},
        {"Exp4 peak nondecreasing in variance", [] { return exp4_monotone(false); }},
        {"Exp4 peak nondecreasing in dimension", [] { return exp4_monotone(true); }},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < props.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = props[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] property %d: %s | %s | %.1fs\n", v.passed ? "PASS" : "FAIL", id, props[i].first,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !v.passed;
    }
    return failures ? 1 : 0;
}
