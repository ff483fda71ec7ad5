#pragma once

// Continuous-time stability of momentum SGD under periodic covariate shift:
// the expected gradient matrix B(t) defines the damped parametric oscillator
//
//     θ'' + α θ' + B(t)(θ − θ*) = 0,   α = (1 − μ)/√η,
//
// whose first-order form ξ' = A(t) ξ is integrated over one period; the
// spectral radius ρ of the resulting monodromy matrix classifies the run
// (ρ > 1 diverges, ρ < 1 converges).

#include <functional>
#include <vector>

#include "resonance/grid.hpp"
#include "resonance/numkit.hpp"
#include "resonance/processes.hpp"

namespace resonance {

using GradMatrixFn = std::function<Mat(double t)>;

/// A(t) = [0 I; −B(t) −((1−μ)/√η) I].
LtvField assemble_A(GradMatrixFn bfun, double mu, double eta);

struct OscillatorSystem {
    GradMatrixFn bfun;
    double mu = 0.95;
    double eta = 0.01;
    std::size_t dim = 0;     // weight dimension (A is 2·dim square)
    double period_ct = 1.0;  // continuous-time period of B

    double alpha() const;
    LtvField field() const { return assemble_A(bfun, mu, eta); }
};

/// System for a deterministic covariate process with period √η/f (sinusoid)
/// or √η·T (square wave). Checks B(t) = B(t + period) at 100 sample points.
OscillatorSystem make_system(const CovariateProcess& proc, double mu, double eta);

/// Continuous period of a deterministic mean in time units of √η per step;
/// 0 for a constant mean.
double continuous_period(const MeanSignal& mean, double eta);

/// At least 1000 RK4 steps per period.
double default_h_ode(double period_ct);

/// Ψ(period) for Ψ' = A(t)Ψ, Ψ(0) = I.
Mat monodromy(const OscillatorSystem& sys, double h_ode);

enum class StabilityClass { Converges, Marginal, Diverges };

struct StabilityVerdict {
    double rho = 0.0;
    StabilityClass cls = StabilityClass::Converges;
};

inline constexpr double kDefaultMarginalBand = 0.02;

StabilityClass classify(double rho, double marginal_band = kDefaultMarginalBand);
StabilityVerdict stability(const OscillatorSystem& sys, double h_ode, double marginal_band = kDefaultMarginalBand);

/// Builds the covariate process for one value of the swept axis (f or T).
using ProcessFactory = std::function<CovariateProcess(double axis_value)>;

/// ρ over a (μ, axis) grid at fixed η. A constant-B cell (f = 0 or T = 0)
/// uses exp(A·τ) with the reference period τ = 1. h_ode <= 0 selects the
/// default per cell. Failing cells are NaN and listed in the grid.
HeatmapGrid theory_heatmap(double eta, const std::vector<double>& mu_grid, const std::vector<double>& axis_grid,
                           const std::string& axis_name, const ProcessFactory& factory, double h_ode = 0.0,
                           std::size_t workers = 0);

/// ρ for one cell, identical to what theory_heatmap stores.
double theory_rho(const CovariateProcess& proc, double mu, double eta, double h_ode = 0.0);

}  // namespace resonance
