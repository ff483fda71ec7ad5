#include "resonance/processes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "resonance/error.hpp"

namespace resonance {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t switching_interval(double interval) {
    return static_cast<std::uint64_t>(std::max(1.0, std::round(interval)));
}

// Snap t/√η onto the integer grid when it is within rounding distance, so the
// continuous embedding reproduces the sampled sequence bit-for-bit.
double continuous_step_index(double t, double eta) {
    const double s = t / std::sqrt(eta);
    const double r = std::round(s);
    if (std::abs(s - r) <= 1e-9 * std::max(1.0, std::abs(s))) return r;
    return s;
}

}  // namespace

double ar2_stationary_variance(const Ar2Coeffs& c, double innovation_var) {
    const double a = 1.0 - c.phi2;
    return innovation_var * a / ((1.0 + c.phi2) * (a * a - c.phi1 * c.phi1));
}

Ar2Coeffs ar2_coeffs(double freq, double target_var, double innovation_var) {
    auto describe = [&] {
        std::ostringstream os;
        os << "(f=" << freq << ", target_var=" << target_var << ", innovation_var=" << innovation_var << ")";
        return os.str();
    };
    require(freq > 0.0 && freq < 0.25, "ar2_coeffs: frequency must lie in (0, 0.25) " + describe());
    require(innovation_var > 0.0 && target_var > innovation_var,
            "ar2_coeffs: need target_var > innovation_var > 0 " + describe());

    const double cosine = std::cos(kTwoPi * freq);
    auto coeffs_for = [&](double phi2) { return Ar2Coeffs{4.0 * phi2 / (phi2 - 1.0) * cosine, phi2}; };
    auto residual = [&](double phi2) {
        return ar2_stationary_variance(coeffs_for(phi2), innovation_var) - target_var;
    };

    // residual < 0 near φ₂ = 0 (variance -> innovation_var) and grows without
    // bound as φ₂ -> −1.
    double hi = 0.0;
    double lo = -1.0;
    double r_lo = residual(std::nextafter(lo, 0.0));
    if (!(r_lo > 0.0) || !std::isfinite(r_lo)) r_lo = residual(-1.0 + 1e-15);
    if (!(r_lo > 0.0)) fail(ErrorCode::InvalidArgument, "ar2_coeffs: no root for phi2 in (-1, 0) " + describe());

    const double tol = 1e-12 * target_var;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 2000; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double r = residual(mid);
        if (std::abs(r) < tol) break;
        if (r > 0.0) lo = mid;
        else hi = mid;
    }
    const Ar2Coeffs c = coeffs_for(mid);
    const bool stationary = std::abs(c.phi2) < 1.0 && c.phi2 - c.phi1 < 1.0 && c.phi1 + c.phi2 < 1.0;
    if (!stationary || std::abs(residual(mid)) > 1e-9 * target_var)
        fail(ErrorCode::NotConverged, "ar2_coeffs: bisection did not reach a stationary root " + describe());
    return c;
}

MeanSignal::MeanSignal(MeanSpec spec) : spec_(std::move(spec)) {
    std::visit(overloaded{
                   [](const Sinusoid& s) {
                       require(s.freq >= 0.0 && s.freq < 0.5, "Sinusoid: freq must lie in [0, 0.5)");
                   },
                   [this](const Ar2& a) {
                       require(a.freq >= 0.0 && a.freq < 0.25, "Ar2: freq must lie in [0, 0.25)");
                       if (a.freq > 0.0) coeffs_ = ar2_coeffs(a.freq, a.target_var, a.innovation_var);
                   },
                   [](const SquareWave& s) {
                       require(s.period >= 0.0, "SquareWave: period must be >= 0");
                       require(!s.direction.empty(), "SquareWave: direction must be non-empty");
                   },
                   [](const Switching& s) {
                       require(s.interval >= 0.0, "Switching: interval must be >= 0");
                       require(s.variance >= 0.0, "Switching: variance must be >= 0");
                       require(s.dim >= 1, "Switching: dim must be >= 1");
                   },
               },
               spec_);
}

std::size_t MeanSignal::dim() const noexcept {
    return std::visit(overloaded{
                          [](const Sinusoid&) -> std::size_t { return 1; },
                          [](const Ar2&) -> std::size_t { return 1; },
                          [](const SquareWave& s) -> std::size_t { return s.direction.size(); },
                          [](const Switching& s) -> std::size_t { return s.dim; },
                      },
                      spec_);
}

bool MeanSignal::deterministic() const noexcept {
    return std::holds_alternative<Sinusoid>(spec_) || std::holds_alternative<SquareWave>(spec_) ||
           is_constant_zero();
}

bool MeanSignal::is_constant_zero() const noexcept {
    return std::visit(overloaded{
                          [](const Sinusoid& s) { return s.freq == 0.0; },
                          [](const Ar2& a) { return a.freq == 0.0; },
                          [](const SquareWave& s) { return s.period == 0.0; },
                          [](const Switching& s) { return s.interval == 0.0; },
                      },
                      spec_);
}

Vec MeanSignal::deterministic_at(double k) const {
    if (is_constant_zero()) return Vec(dim(), 0.0);
    if (const auto* s = std::get_if<Sinusoid>(&spec_)) return {s->amplitude * std::sin(kTwoPi * s->freq * k)};
    const auto& sq = std::get<SquareWave>(spec_);
    const double half = std::fmod(std::floor(2.0 * k / sq.period), 2.0) == 0.0 ? 0.5 : -0.5;
    Vec m(sq.direction.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = half * sq.direction[i];
    return m;
}

Vec MeanSignal::mean_at(std::uint64_t k, Rng& rng) {
    if (deterministic()) return deterministic_at(static_cast<double>(k));

    const auto ki = static_cast<std::int64_t>(k);
    require(ki >= last_k_, "mean_at: stochastic mean sequences must be queried with nondecreasing k");

    if (const auto* a = std::get_if<Ar2>(&spec_)) {
        const double sd0 = std::sqrt(a->target_var);
        const double sdx = std::sqrt(a->innovation_var);
        for (std::int64_t j = last_k_ + 1; j <= ki; ++j) {
            double next;
            if (j < 2) next = rng.normal(0.0, sd0);
            else next = coeffs_->phi1 * ar_prev1_ + coeffs_->phi2 * ar_prev2_ + rng.normal(0.0, sdx);
            ar_prev2_ = ar_prev1_;
            ar_prev1_ = next;
        }
        last_k_ = ki;
        return {ar_prev1_};
    }

    const auto& sw = std::get<Switching>(spec_);
    const double sd = std::sqrt(sw.variance);
    auto draw = [&] {
        switch_mean_.resize(sw.dim);
        for (double& v : switch_mean_) v = rng.normal(0.0, sd);
    };
    const std::uint64_t target = k / switching_interval(sw.interval);
    if (last_k_ < 0) {
        draw();
        switch_index_ = 0;
    }
    while (switch_index_ < target) {
        draw();
        ++switch_index_;
    }
    last_k_ = ki;
    return switch_mean_;
}

Vec MeanSignal::mean_continuous(double t, double eta) const {
    require(eta > 0.0, "mean_continuous: eta must be positive");
    require(deterministic(), "mean_continuous: stochastic mean sequences have no continuous embedding");
    return deterministic_at(continuous_step_index(t, eta));
}

CovariateProcess::CovariateProcess(MeanSignal mean, double cov_scale, bool append_bias)
    : mean_(std::move(mean)), cov_scale_(cov_scale), append_bias_(append_bias) {
    require(cov_scale >= 0.0, "CovariateProcess: cov_scale must be >= 0");
}

Mat CovariateProcess::sample(std::uint64_t k, std::size_t n, Rng& rng) {
    require(n >= 1, "sample: need at least one sample per step");
    const Vec m = mean_.mean_at(k, rng);
    const double sd = std::sqrt(cov_scale_);
    Mat out(n, sample_dim());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m.size(); ++j) out(r, j) = sd == 0.0 ? m[j] : m[j] + sd * rng.normal();
        if (append_bias_) out(r, m.size()) = 1.0;
    }
    return out;
}

}  // namespace resonance
