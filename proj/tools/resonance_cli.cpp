// Command-line front end over the C API. Flags are folded into the JSON
// config (flags win over --config file values) and handed to the library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "resonance/resonance.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
    std::string config_path;
    std::string experiment;
    std::string out;
    std::string seed;
    std::string workers;
    std::string eta, mu, mu_range, freq_range, period_range, variance, dim, samples_per_step, beta1;
    std::string steps, window, runs;
    std::string pgm_lo, pgm_hi;
    std::string segment;
    bool full = false;
};

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(rsn_status s, const char* what) {
    if (s != RSN_OK) {
        std::ostringstream os;
        os << what << ": " << rsn_status_string(s);
        const std::string detail = rsn_last_error();
        if (!detail.empty()) os << ": " << detail;
        throw CliError(os.str());
    }
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};
using Config = Handle<rsn_config, rsn_config_free>;
using Grid = Handle<rsn_grid, rsn_grid_free>;
using Records = Handle<rsn_records, rsn_records_free>;
using Contours = Handle<rsn_contours, rsn_contours_free>;

// Numbers stay numbers; lists and ranges pass through as strings for the
// library's axis parser.
json scalar_or_string(const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    return v;
}

json build_config(const Flags& f, const std::string& default_experiment) {
    json j = json::object();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw CliError("cannot open config file '" + f.config_path + "'");
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw CliError("config file '" + f.config_path + "': " + e.what());
        }
        if (!j.is_object()) throw CliError("config file must contain a JSON object");
    }
    if (!f.experiment.empty()) j["experiment"] = f.experiment;
    if (!j.contains("experiment")) j["experiment"] = default_experiment;

    auto set = [&j](const char* key, const std::string& v) {
        if (!v.empty()) j[key] = scalar_or_string(v);
    };
    set("seed", f.seed);
    set("workers", f.workers);
    set("eta", f.eta);
    set("mu", f.mu);
    if (!f.mu_range.empty()) j["mu"] = f.mu_range;
    if (!f.freq_range.empty()) j["freq_or_period"] = f.freq_range;
    if (!f.period_range.empty()) j["freq_or_period"] = f.period_range;
    set("variance", f.variance);
    set("dim", f.dim);
    set("samples_per_step", f.samples_per_step);
    set("beta1", f.beta1);
    set("steps", f.steps);
    set("window", f.window);
    set("runs", f.runs);
    set("pgm_lo", f.pgm_lo);
    set("pgm_hi", f.pgm_hi);
    if (!f.out.empty()) j["out"] = f.out;
    return j;
}

json effective(const rsn_config* cfg) {
    std::size_t need = 0;
    check(rsn_config_to_json(cfg, nullptr, 0, &need), "config");
    std::string buf(need, '\0');
    check(rsn_config_to_json(cfg, buf.data(), buf.size(), &need), "config");
    buf.resize(need - 1);
    return json::parse(buf);
}

void load(Config& cfg, const json& j) { check(rsn_config_from_json(j.dump().c_str(), cfg.out()), "config"); }

std::string out_dir(const json& eff) {
    const std::string dir = eff.at("out").get<std::string>();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

std::string tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

bool has_theory(const std::string& experiment) {
    return experiment == "exp1" || experiment == "exp2" || experiment == "exp3" || experiment == "a2_stepsize" ||
           experiment == "a3_stochastic";
}

std::size_t count_above(const rsn_grid* g, double level) {
    std::size_t n = 0;
    for (std::size_t r = 0; r < rsn_grid_rows(g); ++r)
        for (std::size_t c = 0; c < rsn_grid_cols(g); ++c) {
            double v = 0.0;
            check(rsn_grid_value(g, r, c, &v), "grid");
            n += v > level;
        }
    return n;
}

int cmd_theory(const Flags& f) {
    const json j = build_config(f, "exp1");
    Config cfg;
    load(cfg, j);
    const json eff = effective(cfg.get());
    const std::string dir = out_dir(eff);
    std::size_t n_eta = 0;
    check(rsn_config_eta_count(cfg.get(), &n_eta), "config");
    for (std::size_t i = 0; i < n_eta; ++i) {
        double eta = 0.0;
        check(rsn_config_eta(cfg.get(), i, &eta), "config");
        Grid g;
        check(rsn_theory_heatmap(cfg.get(), i, g.out()), "theory heatmap");
        const std::string stem = "theory_rho_eta" + tag(eta);
        check(rsn_grid_write_csv(g.get(), path_in(dir, stem + ".csv").c_str()), "write grid");
        check(rsn_grid_write_pgm(g.get(), eff["pgm_lo"], eff["pgm_hi"], path_in(dir, stem + ".pgm").c_str()),
              "write pgm");
        Contours c;
        check(rsn_contours_extract(g.get(), 1.0, c.out()), "contours");
        check(rsn_contours_write_csv(c.get(), g.get(), path_in(dir, stem + "_contour.csv").c_str()), "write contours");
        std::cout << "eta=" << eta << ": " << rsn_grid_rows(g.get()) << "x" << rsn_grid_cols(g.get())
                  << " cells, rho>1 in " << count_above(g.get(), 1.0) << ", " << rsn_contours_count(c.get())
                  << " contour(s), " << rsn_grid_failure_count(g.get()) << " failed cell(s)\n";
    }
    return 0;
}

int cmd_empirical(const Flags& f) {
    const json base = build_config(f, "exp1");
    Config probe;
    load(probe, base);
    const json eff = effective(probe.get());
    const std::string dir = out_dir(eff);
    const std::string experiment = eff["experiment"];
    for (double eta : eff["eta"]) {
        json j = base;
        j["eta"] = eta;
        Config cfg;
        load(cfg, j);
        Grid g;
        Records recs;
        check(rsn_empirical_heatmap(cfg.get(), g.out(), recs.out()), "empirical heatmap");
        const std::string stem = experiment + "_eta" + tag(eta);
        check(rsn_records_write_csv(recs.get(), path_in(dir, stem + "_records.csv").c_str()), "write records");
        check(rsn_grid_write_csv(g.get(), path_in(dir, stem + "_empirical.csv").c_str()), "write grid");
        check(rsn_grid_write_pgm(g.get(), eff["pgm_lo"], eff["pgm_hi"], path_in(dir, stem + "_empirical.pgm").c_str()),
              "write pgm");
        std::size_t diverged = 0;
        for (std::size_t i = 0; i < rsn_records_count(recs.get()); ++i) {
            rsn_run_record r;
            check(rsn_records_get(recs.get(), i, &r), "records");
            diverged += r.diverged;
        }
        std::cout << stem << ": " << rsn_records_count(recs.get()) << " runs, " << diverged << " diverged";
        if (has_theory(experiment)) {
            Grid th;
            check(rsn_theory_heatmap(cfg.get(), 0, th.out()), "theory heatmap");
            Contours c;
            check(rsn_theory_overlay(g.get(), th.get(), c.out()), "theory overlay");
            check(rsn_grid_write_csv(th.get(), path_in(dir, stem + "_theory.csv").c_str()), "write grid");
            check(rsn_contours_write_csv(c.get(), th.get(), path_in(dir, stem + "_contour.csv").c_str()),
                  "write contours");
            std::cout << ", theory rho>1 in " << count_above(th.get(), 1.0) << " cells";
        }
        std::cout << "\n";
    }
    return 0;
}

int run_sweep(const Flags& f, const std::string& default_experiment, const std::string& stem_default) {
    const json j = build_config(f, default_experiment);
    Config cfg;
    load(cfg, j);
    const json eff = effective(cfg.get());
    const std::string dir = out_dir(eff);
    Records recs;
    check(rsn_sweep(cfg.get(), recs.out()), "sweep");
    const std::string stem = stem_default.empty() ? eff["experiment"].get<std::string>() : stem_default;
    check(rsn_records_write_csv(recs.get(), path_in(dir, stem + "_records.csv").c_str()), "write records");
    check(rsn_records_write_summary_csv(recs.get(), path_in(dir, stem + "_summary.csv").c_str()), "write summary");
    std::size_t diverged = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < rsn_records_count(recs.get()); ++i) {
        rsn_run_record r;
        check(rsn_records_get(recs.get(), i, &r), "records");
        diverged += r.diverged;
        worst = std::max(worst, r.metric);
    }
    std::cout << stem << ": " << rsn_records_count(recs.get()) << " runs, " << diverged
              << " diverged, max metric " << worst << "\n";
    return 0;
}

int cmd_psd(const Flags& f) {
    json j = build_config(f, "exp2");
    // One series per frequency/period value; other axes pinned to their first entry.
    Config probe;
    load(probe, j);
    json eff = effective(probe.get());
    for (const char* axis : {"mu", "eta", "variance", "dim", "samples_per_step", "beta1"})
        j[axis] = eff[axis].front();
    if (f.steps.empty()) j["steps"] = 131072;
    if (f.window.empty()) j["window"] = 4096;
    Config cfg;
    load(cfg, j);
    eff = effective(cfg.get());
    const std::string dir = out_dir(eff);
    const std::uint64_t steps = eff["steps"];
    const std::size_t segment = eff["window"];
    const std::string experiment = eff["experiment"];
    const auto axis_values = eff["freq_or_period"];
    for (std::size_t i = 0; i < axis_values.size(); ++i) {
        for (int sampled = 0; sampled < 2; ++sampled) {
            std::vector<double> xs(steps);
            check(rsn_process_series(cfg.get(), i, steps, sampled, xs.data()), "process series");
            std::size_t bins = 0;
            check(rsn_psd(xs.data(), xs.size(), segment, 0.5, nullptr, nullptr, 0, &bins), "psd");
            std::vector<double> fr(bins), pw(bins);
            check(rsn_psd(xs.data(), xs.size(), segment, 0.5, fr.data(), pw.data(), bins, &bins), "psd");
            const std::string name = experiment + "_psd_" + tag(axis_values[i].get<double>()) +
                                     (sampled ? "_sampled.csv" : "_mean.csv");
            check(rsn_psd_write_csv(fr.data(), pw.data(), bins, path_in(dir, name).c_str()), "write psd");
            std::size_t peak = 0;
            for (std::size_t b = 1; b < bins; ++b)
                if (pw[b] > pw[peak]) peak = b;
            std::cout << name << ": peak at f=" << fr[peak] << "\n";
        }
    }
    return 0;
}

void print_check(const char* name, int passed, const char* detail, double seconds, void*) {
    std::printf("%s %-36s %s (%.2fs)\n", passed ? "PASS" : "FAIL", name, detail, seconds);
    std::fflush(stdout);
}

int cmd_verify(const Flags& f) {
    std::size_t workers = 0;
    if (!f.workers.empty()) workers = std::stoul(f.workers);
    std::size_t failures = 0;
    check(rsn_verify(f.full ? 1 : 0, workers, print_check, nullptr, &failures), "verify");
    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
    return failures == 0 ? 0 : 1;
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON config file (flags override its fields)");
    sub->add_option("--experiment,-e", f.experiment,
                    "exp1..exp6, a2_momentum, a2_stepsize, a3_stochastic");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "base seed (u64)");
    sub->add_option("--workers", f.workers, "worker threads (0 = all cores)");
    sub->add_option("--eta", f.eta, "step size(s), comma-separated");
    sub->add_option("--mu", f.mu, "momentum value(s), comma-separated");
    sub->add_option("--mu-range", f.mu_range, "momentum grid a:b:n");
    sub->add_option("--freq-range", f.freq_range, "frequency grid a:b:n (cycles/step)");
    sub->add_option("--period-range", f.period_range, "period/interval grid a:b:n (steps)");
    sub->add_option("--variance", f.variance, "switching variance(s)");
    sub->add_option("--dim", f.dim, "input dimension(s)");
    sub->add_option("--samples-per-step", f.samples_per_step, "samples drawn per step");
    sub->add_option("--beta1", f.beta1, "ADAM beta1 value(s)");
    sub->add_option("--steps", f.steps, "training steps (psd: series length)");
    sub->add_option("--window", f.window, "metric window (psd: Welch segment length)");
    sub->add_option("--runs", f.runs, "seeds per cell");
    sub->add_option("--pgm-lo", f.pgm_lo, "log10 value mapped to black");
    sub->add_option("--pgm-hi", f.pgm_hi, "log10 value mapped to white");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Momentum SGD resonance under covariate shift: stability theory and experiment sweeps"};
    app.require_subcommand(1);
    Flags f;
    auto* theory = app.add_subcommand("theory-heatmap", "spectral radius of the monodromy matrix over (mu, f)");
    auto* empirical = app.add_subcommand("empirical-heatmap", "window-mean distance over (mu, f or T)");
    auto* sweep = app.add_subcommand("sweep", "all cells x runs of an experiment, as CSV records");
    auto* psd = app.add_subcommand("psd", "Welch spectra of the covariate mean and samples");
    auto* nn = app.add_subcommand("nn", "neural network resonance sweep");
    auto* verify = app.add_subcommand("verify", "run the built-in oracle checks");
    for (auto* s : {theory, empirical, sweep, psd, nn, verify}) add_common(s, f);
    verify->add_flag("--full", f.full, "include the slower sampled checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*theory) return cmd_theory(f);
        if (*empirical) return cmd_empirical(f);
        if (*sweep) return run_sweep(f, "exp3", "");
        if (*psd) return cmd_psd(f);
        if (*nn) {
            if (!f.experiment.empty() && f.experiment != "exp6") throw CliError("nn runs experiment exp6 only");
            Flags g = f;
            g.experiment = "exp6";
            return run_sweep(g, "exp6", "nn");
        }
        if (*verify) return cmd_verify(f);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
