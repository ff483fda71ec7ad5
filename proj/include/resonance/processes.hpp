#pragma once

// Covariate-shift processes: a mean sequence {x̄_k} (deterministic or
// stochastic) plus Gaussian sampling X_k ~ N(x̄_k, c I).

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>

#include "resonance/numkit.hpp"
#include "resonance/rng.hpp"

namespace resonance {

struct Sinusoid {
    double amplitude = 0.5;
    double freq = 0.0;  // cycles per step, [0, 0.5)
};

struct Ar2 {
    double freq = 0.0;
    double target_var = 0.1;
    double innovation_var = 1e-5;
};

struct SquareWave {
    double period = 0.0;  // steps; 0 means constant zero mean
    Vec direction;        // unit vector; the mean is ±direction/2
};

struct Switching {
    double interval = 0.0;  // steps; rounded to the nearest integer >= 1 when positive
    double variance = 0.0;
    std::size_t dim = 1;
};

using MeanSpec = std::variant<Sinusoid, Ar2, SquareWave, Switching>;

struct Ar2Coeffs {
    double phi1 = 0.0;
    double phi2 = 0.0;
};

/// φ₁ from the spectral-peak closed form, φ₂ by bisection on (−1, 0) so the
/// stationary variance equals target_var.
Ar2Coeffs ar2_coeffs(double freq, double target_var, double innovation_var);

/// Stationary variance of an AR(2) driven by innovations of variance innovation_var.
double ar2_stationary_variance(const Ar2Coeffs& c, double innovation_var);

/// The mean sequence with whatever state the stochastic variants need.
/// Stochastic variants must be queried with nondecreasing k; intermediate
/// steps are generated internally so values never depend on query pattern.
class MeanSignal {
public:
    explicit MeanSignal(MeanSpec spec);

    const MeanSpec& spec() const noexcept { return spec_; }
    std::size_t dim() const noexcept;
    bool deterministic() const noexcept;
    bool is_constant_zero() const noexcept;

    Vec mean_at(std::uint64_t k, Rng& rng);

    /// Continuous-time embedding with t = √η·k. Deterministic variants only.
    Vec mean_continuous(double t, double eta) const;

    std::optional<Ar2Coeffs> ar2() const noexcept { return coeffs_; }

private:
    Vec deterministic_at(double k) const;

    MeanSpec spec_;
    std::optional<Ar2Coeffs> coeffs_;
    std::int64_t last_k_ = -1;
    // Ar2: last two values; Switching: the current interval mean.
    double ar_prev1_ = 0.0;
    double ar_prev2_ = 0.0;
    std::uint64_t switch_index_ = 0;
    Vec switch_mean_;
};

class CovariateProcess {
public:
    CovariateProcess(MeanSignal mean, double cov_scale, bool append_bias);

    std::size_t dim() const noexcept { return mean_.dim(); }
    std::size_t sample_dim() const noexcept { return dim() + (append_bias_ ? 1 : 0); }
    double cov_scale() const noexcept { return cov_scale_; }
    bool append_bias() const noexcept { return append_bias_; }
    const MeanSignal& mean() const noexcept { return mean_; }
    MeanSignal& mean() noexcept { return mean_; }

    /// n draws from N(mean_at(k), c I), one per row, bias column last if configured.
    Mat sample(std::uint64_t k, std::size_t n, Rng& rng);

private:
    MeanSignal mean_;
    double cov_scale_;
    bool append_bias_;
};

struct PsdPoint {
    double freq;
    double power;
};

/// Welch estimate: Hann window, overlapping segments, averaged one-sided
/// periodogram with unit sampling rate (frequencies in cycles per step).
std::vector<PsdPoint> psd(std::span<const double> series, std::size_t segment_len, double overlap = 0.5);

}  // namespace resonance
