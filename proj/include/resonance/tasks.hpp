#pragma once

#include <span>

#include "resonance/numkit.hpp"
#include "resonance/processes.hpp"
#include "resonance/rng.hpp"

namespace resonance {

/// Y = <θ*, x> + ε with θ* fixed for the whole run (bias weight last when the
/// process appends a bias coordinate).
struct LinearTask {
    Vec theta_star;
    double noise_var = 0.0;
};

/// Y = cos(π‖x‖) + ε.
struct NonlinearTask {
    double noise_var = 0.0;
};

double label(const LinearTask& task, std::span<const double> x, Rng& rng);
double label(const NonlinearTask& task, std::span<const double> x, Rng& rng);

double target(const NonlinearTask& task, std::span<const double> x);  // noise-free

/// Batch-mean gradient of the squared error: (1/n) Σ 2(<θ, x_i> − y_i) x_i.
Vec mse_grad(std::span<const double> theta, const Mat& inputs, std::span<const double> labels);

/// B = 2 E[X Xᵀ] for X ~ N(mean, c I) with an optional trailing constant-1
/// coordinate (which carries no variance).
Mat expected_grad_matrix(std::span<const double> mean, double cov_scale, bool append_bias);
Mat expected_grad_matrix(CovariateProcess& proc, std::uint64_t k, Rng& rng);
Mat expected_grad_matrix_continuous(const CovariateProcess& proc, double t, double eta);

double distance_to_target(std::span<const double> theta, std::span<const double> theta_star);

}  // namespace resonance
