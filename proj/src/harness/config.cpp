#include <array>
#include <charconv>
#include <cmath>

#include "json.hpp"

#include "resonance/error.hpp"
#include "resonance/harness.hpp"

namespace resonance {

using nlohmann::json;

namespace {

struct ExperimentName {
    ExperimentId id;
    std::string_view name;
};

constexpr std::array<ExperimentName, 9> kNames{{
    {ExperimentId::Exp1, "exp1"},
    {ExperimentId::Exp2, "exp2"},
    {ExperimentId::Exp3, "exp3"},
    {ExperimentId::Exp4, "exp4"},
    {ExperimentId::Exp5, "exp5"},
    {ExperimentId::Exp6, "exp6"},
    {ExperimentId::A2Momentum, "a2_momentum"},
    {ExperimentId::A2StepSize, "a2_stepsize"},
    {ExperimentId::A3Stochastic, "a3_stochastic"},
}};

double parse_number(std::string_view s, const std::string& what) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorCode::InvalidArgument, what + ": not a number: '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::string_view to_string(ExperimentId id) {
    for (const auto& n : kNames)
        if (n.id == id) return n.name;
    return "unknown";
}

ExperimentId parse_experiment(std::string_view name) {
    for (const auto& n : kNames)
        if (n.name == name) return n.id;
    fail(ErrorCode::InvalidArgument, "unknown experiment '" + std::string(name) + "'");
}

MeanKind mean_kind(ExperimentId id) {
    switch (id) {
        case ExperimentId::Exp1:
        case ExperimentId::A2StepSize:
        case ExperimentId::A3Stochastic: return MeanKind::Sinusoid;
        case ExperimentId::Exp2: return MeanKind::Ar2;
        case ExperimentId::Exp3: return MeanKind::SquareWave;
        default: return MeanKind::Switching;
    }
}

ModelKind model_kind(ExperimentId id) { return id == ExperimentId::Exp6 ? ModelKind::Mlp : ModelKind::Linear; }

OptimizerKind optimizer_kind(ExperimentId id) {
    return id == ExperimentId::Exp5 ? OptimizerKind::Adam : OptimizerKind::Sgdm;
}

const char* axis_name(ExperimentId id) {
    const MeanKind k = mean_kind(id);
    return (k == MeanKind::Sinusoid || k == MeanKind::Ar2) ? "freq" : "period";
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    require(n >= 1, "linspace: need at least one point");
    if (n == 1) return {lo};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

ExperimentConfig default_config(ExperimentId id) {
    ExperimentConfig c;
    c.experiment = id;
    c.eta = {0.01};
    c.variance = {0.0};
    c.dim = {1};
    c.beta1 = {0.0};
    switch (id) {
        case ExperimentId::Exp1:
        case ExperimentId::Exp2:
        case ExperimentId::A2StepSize:
        case ExperimentId::A3Stochastic:
            c.mu = linspace(0.95, 0.999, 60);
            c.freq_or_period = linspace(0.0, 0.05, 60);
            c.samples_per_step = {20};
            c.cov_scale = 1.0;
            c.noise_var = 0.0;
            if (id == ExperimentId::A2StepSize) c.eta = {0.01, 0.005, 0.001};
            if (id == ExperimentId::A3Stochastic) c.samples_per_step = {1};
            break;
        case ExperimentId::Exp3:
            c.mu = {0.95};
            c.freq_or_period = linspace(0.0, 120.0, 40);
            c.dim = {5};
            c.samples_per_step = {1, 2, 3, 4, 5};
            c.cov_scale = 0.25;
            c.noise_var = 0.1;
            break;
        case ExperimentId::Exp4:
        case ExperimentId::A2Momentum:
            c.mu = {0.95};
            c.freq_or_period = linspace(0.0, 50.0, 40);
            c.variance = {0.1, 0.25, 0.4};
            c.dim = {5};
            c.samples_per_step = {10};
            c.cov_scale = 0.25;
            c.noise_var = 0.1;
            if (id == ExperimentId::A2Momentum) {
                c.mu = {0.85, 0.875, 0.9, 0.925, 0.95};
                c.variance = {0.4};
            }
            break;
        case ExperimentId::Exp5:
            c.mu = {0.0};
            c.freq_or_period = linspace(0.0, 100.0, 40);
            c.variance = {1.0};
            c.dim = {5};
            c.samples_per_step = {10};
            c.beta1 = {0.9, 0.95, 0.99};
            c.cov_scale = 0.1;
            c.noise_var = 0.1;
            c.window = 2000;
            break;
        case ExperimentId::Exp6:
            c.mu = {0.95};
            c.freq_or_period = linspace(0.0, 100.0, 40);
            c.variance = {0.4};
            c.dim = {2};
            c.samples_per_step = {10};
            c.cov_scale = 0.1;
            c.noise_var = 0.1;
            c.steps = 20000;
            c.window = 2000;
            c.runs = 20;
            break;
    }
    return c;
}

std::size_t ExperimentConfig::cell_count() const {
    return mu.size() * eta.size() * freq_or_period.size() * variance.size() * dim.size() * samples_per_step.size() *
           beta1.size();
}

void ExperimentConfig::validate() const {
    auto nonempty = [](const auto& v, const char* name) {
        require(!v.empty(), std::string("config: axis '") + name + "' is empty");
    };
    nonempty(mu, "mu");
    nonempty(eta, "eta");
    nonempty(freq_or_period, "freq_or_period");
    nonempty(variance, "variance");
    nonempty(dim, "dim");
    nonempty(samples_per_step, "samples_per_step");
    nonempty(beta1, "beta1");

    const MeanKind mk = mean_kind(experiment);
    const bool adam = optimizer_kind(experiment) == OptimizerKind::Adam;
    for (double m : mu) require(std::isfinite(m) && m >= 0.0 && m < 1.0, "config: mu must lie in [0, 1)");
    for (double e : eta) require(std::isfinite(e) && e > 0.0, "config: eta must be positive");
    for (double x : freq_or_period) {
        require(std::isfinite(x) && x >= 0.0, "config: frequency/period must be finite and >= 0");
        if (mk == MeanKind::Sinusoid) require(x < 0.5, "config: frequency must be < 0.5");
        if (mk == MeanKind::Ar2) require(x < 0.25, "config: AR(2) frequency must be < 0.25");
    }
    for (double v : variance) require(std::isfinite(v) && v >= 0.0, "config: variance must be >= 0");
    for (std::size_t d : dim) require(d >= 1, "config: dim must be >= 1");
    for (std::size_t n : samples_per_step) require(n >= 1, "config: samples_per_step must be >= 1");
    for (double b : beta1) require(std::isfinite(b) && b >= 0.0 && b < 1.0, "config: beta1 must lie in [0, 1)");

    if (mk == MeanKind::Sinusoid || mk == MeanKind::Ar2)
        require(dim.size() == 1 && dim[0] == 1, "config: sinusoid/AR(2) experiments are one-dimensional (dim = 1)");
    if (mk != MeanKind::Switching) require(variance.size() == 1, "config: variance axis only applies to switching means");
    if (!adam) require(beta1.size() == 1, "config: beta1 axis only applies to ADAM");
    if (adam) require(mu.size() == 1, "config: mu axis does not apply to ADAM");

    require(std::isfinite(amplitude), "config: amplitude must be finite");
    require(std::isfinite(cov_scale) && cov_scale >= 0.0, "config: cov_scale must be >= 0");
    require(ar2_target_var > 0.0 && ar2_innovation_var > 0.0, "config: AR(2) variances must be positive");
    require(beta2 >= 0.0 && beta2 < 1.0, "config: beta2 must lie in [0, 1)");
    require(eps_hat > 0.0, "config: eps_hat must be positive");
    require(std::isfinite(noise_var) && noise_var >= 0.0, "config: noise_var must be >= 0");
    require(steps >= 1, "config: steps must be >= 1");
    require(window >= 1 && window <= steps, "config: window must lie in [1, steps]");
    require(runs >= 1, "config: runs must be >= 1");
    require(test_points >= 1, "config: test_points must be >= 1");
    require(test_every >= 1, "config: test_every must be >= 1");
    require(h_ode >= 0.0, "config: h_ode must be >= 0 (0 selects the default)");
    require(marginal_band >= 0.0, "config: marginal_band must be >= 0");
    require(pgm_hi > pgm_lo, "config: pgm_hi must exceed pgm_lo");
}

namespace {

// "a:b:n" → linspace(a, b, n)
std::vector<double> parse_range(std::string_view s, const std::string& key) {
    const auto p1 = s.find(':');
    const auto p2 = p1 == std::string_view::npos ? p1 : s.find(':', p1 + 1);
    if (p2 == std::string_view::npos)
        fail(ErrorCode::InvalidArgument, key + ": range must have the form a:b:n, got '" + std::string(s) + "'");
    const double lo = parse_number(s.substr(0, p1), key);
    const double hi = parse_number(s.substr(p1 + 1, p2 - p1 - 1), key);
    const double n = parse_number(s.substr(p2 + 1), key);
    if (!(n >= 1.0) || n != std::floor(n) || n > 1e6)
        fail(ErrorCode::InvalidArgument, key + ": range count must be a positive integer");
    return linspace(lo, hi, static_cast<std::size_t>(n));
}

std::vector<double> read_axis(const json& j, const std::string& key) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s.find(':') != std::string::npos) return parse_range(s, key);
        std::vector<double> out;
        std::size_t start = 0;
        while (start <= s.size()) {
            const auto comma = s.find(',', start);
            const auto end = comma == std::string::npos ? s.size() : comma;
            out.push_back(parse_number(std::string_view(s).substr(start, end - start), key));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& e : j) {
            if (!e.is_number()) fail(ErrorCode::InvalidArgument, key + ": array entries must be numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    fail(ErrorCode::InvalidArgument, key + ": expected a number, an array or an 'a:b:n' range");
}

std::vector<std::size_t> read_count_axis(const json& j, const std::string& key) {
    std::vector<std::size_t> out;
    for (double v : read_axis(j, key)) {
        if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
            fail(ErrorCode::InvalidArgument, key + ": entries must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

double read_real(const json& j, const std::string& key) {
    if (!j.is_number()) fail(ErrorCode::InvalidArgument, key + ": expected a number");
    return j.get<double>();
}

std::uint64_t read_u64(const json& j, const std::string& key) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
    }
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size()) return v;
    }
    fail(ErrorCode::InvalidArgument, key + ": expected a non-negative integer");
}

}  // namespace

ExperimentConfig config_from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::InvalidArgument, std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(ErrorCode::InvalidArgument, "config: top level must be an object");

    ExperimentId id = ExperimentId::Exp1;
    if (doc.contains("experiment")) {
        if (!doc["experiment"].is_string()) fail(ErrorCode::InvalidArgument, "config: 'experiment' must be a string");
        id = parse_experiment(doc["experiment"].get<std::string>());
    }
    ExperimentConfig c = default_config(id);

    for (const auto& [raw_key, val] : doc.items()) {
        std::string key = raw_key;
        // "<axis>_range" is an alias taking an a:b:n string
        if (key.size() > 6 && key.ends_with("_range")) key.resize(key.size() - 6);
        if (val.is_null()) continue;

        if (key == "experiment") continue;
        else if (key == "mu") c.mu = read_axis(val, raw_key);
        else if (key == "eta") c.eta = read_axis(val, raw_key);
        else if (key == "freq" || key == "period" || key == "freq_or_period") c.freq_or_period = read_axis(val, raw_key);
        else if (key == "variance") c.variance = read_axis(val, raw_key);
        else if (key == "dim") c.dim = read_count_axis(val, raw_key);
        else if (key == "samples_per_step") c.samples_per_step = read_count_axis(val, raw_key);
        else if (key == "beta1") c.beta1 = read_axis(val, raw_key);
        else if (key == "amplitude") c.amplitude = read_real(val, key);
        else if (key == "cov_scale") c.cov_scale = read_real(val, key);
        else if (key == "ar2_target_var") c.ar2_target_var = read_real(val, key);
        else if (key == "ar2_innovation_var") c.ar2_innovation_var = read_real(val, key);
        else if (key == "beta2") c.beta2 = read_real(val, key);
        else if (key == "eps_hat") c.eps_hat = read_real(val, key);
        else if (key == "noise_var") c.noise_var = read_real(val, key);
        else if (key == "steps") c.steps = read_u64(val, key);
        else if (key == "window") c.window = read_u64(val, key);
        else if (key == "runs") c.runs = read_u64(val, key);
        else if (key == "seed") c.seed = read_u64(val, key);
        else if (key == "workers") c.workers = read_u64(val, key);
        else if (key == "test_points") c.test_points = read_u64(val, key);
        else if (key == "test_every") c.test_every = read_u64(val, key);
        else if (key == "h_ode") c.h_ode = read_real(val, key);
        else if (key == "marginal_band") c.marginal_band = read_real(val, key);
        else if (key == "pgm_lo") c.pgm_lo = read_real(val, key);
        else if (key == "pgm_hi") c.pgm_hi = read_real(val, key);
        else if (key == "out" || key == "out_dir") {
            if (!val.is_string()) fail(ErrorCode::InvalidArgument, "config: 'out' must be a string");
            c.out_dir = val.get<std::string>();
        } else {
            fail(ErrorCode::InvalidArgument, "config: unknown field '" + raw_key + "'");
        }
    }
    c.validate();
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = std::string(to_string(c.experiment));
    j["mu"] = c.mu;
    j["eta"] = c.eta;
    j["freq_or_period"] = c.freq_or_period;
    j["variance"] = c.variance;
    j["dim"] = c.dim;
    j["samples_per_step"] = c.samples_per_step;
    j["beta1"] = c.beta1;
    j["amplitude"] = c.amplitude;
    j["cov_scale"] = c.cov_scale;
    j["ar2_target_var"] = c.ar2_target_var;
    j["ar2_innovation_var"] = c.ar2_innovation_var;
    j["beta2"] = c.beta2;
    j["eps_hat"] = c.eps_hat;
    j["noise_var"] = c.noise_var;
    j["steps"] = c.steps;
    j["window"] = c.window;
    j["runs"] = c.runs;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["test_points"] = c.test_points;
    j["test_every"] = c.test_every;
    j["h_ode"] = c.h_ode;
    j["marginal_band"] = c.marginal_band;
    j["pgm_lo"] = c.pgm_lo;
    j["pgm_hi"] = c.pgm_hi;
    j["out"] = c.out_dir;
    return j.dump(2);
}

std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    cells.reserve(cfg.cell_count());
    for (double mu : cfg.mu)
        for (double eta : cfg.eta)
            for (double x : cfg.freq_or_period)
                for (double v : cfg.variance)
                    for (std::size_t d : cfg.dim)
                        for (std::size_t n : cfg.samples_per_step)
                            for (double b1 : cfg.beta1) {
                                Cell c;
                                c.index = cells.size();
                                c.mu = mu;
                                c.eta = eta;
                                c.freq_or_period = x;
                                c.variance = v;
                                c.dim = d;
                                c.samples_per_step = n;
                                c.beta1 = b1;
                                cells.push_back(c);
                            }
    return cells;
}

}  // namespace resonance
