#pragma once

#include <cstdint>
#include <span>

#include "resonance/numkit.hpp"

namespace resonance {

// Runs freeze once ‖θ‖ exceeds this (or anything goes non-finite).
inline constexpr double kDivergenceNorm = 1e8;

struct DivergenceFlag {
    bool diverged = false;
    std::uint64_t step = 0;  // index of the update that tripped the guard
};

struct SgdmState {
    Vec theta;
    Vec v;  // zero-initialized
    double eta = 0.01;
    double mu = 0.9;
    std::uint64_t steps = 0;
    DivergenceFlag divergence;

    static SgdmState start(Vec theta0, double eta, double mu);
};

struct AdamState {
    Vec theta;
    Vec m;
    Vec s;
    std::uint64_t steps = 0;
    double eta = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
    DivergenceFlag divergence;

    static AdamState start(Vec theta0, double eta, double beta1, double beta2, double eps_hat = 1e-8);
};

/// v ← μv − η·g, then θ ← θ + v. A non-finite gradient or a blown-up θ
/// marks the state diverged; diverged states are returned unchanged.
SgdmState sgdm_step(SgdmState state, std::span<const double> grad);

/// ADAM with bias correction; eps_hat is added after the square root.
AdamState adam_step(AdamState state, std::span<const double> grad);

/// Phase-space point ξ = [θ − θ*; θ̇].
struct PhaseVector {
    Vec xi;

    std::size_t dim() const noexcept { return xi.size() / 2; }
    std::span<const double> displacement() const noexcept { return std::span(xi).first(dim()); }
    std::span<const double> velocity() const noexcept { return std::span(xi).last(dim()); }
};

/// One step of the split integrator for ξ' = [0 I; −B −αI] ξ: explicit Euler
/// on the force part, then implicit Euler on the kinematic part.
PhaseVector split_step(const PhaseVector& x, const Mat& b, double alpha, double h);

/// The same step with h = √η and α = (1 − μ)/√η, i.e. the form that
/// coincides with SGDm.
PhaseVector split_step_sgdm(const PhaseVector& x, const Mat& b, double mu, double eta);

}  // namespace resonance
