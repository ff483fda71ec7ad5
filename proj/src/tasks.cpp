#include "resonance/tasks.hpp"

#include <cmath>
#include <numbers>

#include "resonance/error.hpp"

namespace resonance {

double label(const LinearTask& task, std::span<const double> x, Rng& rng) {
    require(x.size() == task.theta_star.size(), "label: input dimension does not match theta_star");
    const double noise = task.noise_var > 0.0 ? rng.normal(0.0, std::sqrt(task.noise_var)) : 0.0;
    return dot(task.theta_star, x) + noise;
}

double target(const NonlinearTask&, std::span<const double> x) {
    require(!x.empty(), "label: empty input");
    return std::cos(std::numbers::pi * norm2(x));
}

double label(const NonlinearTask& task, std::span<const double> x, Rng& rng) {
    const double noise = task.noise_var > 0.0 ? rng.normal(0.0, std::sqrt(task.noise_var)) : 0.0;
    return target(task, x) + noise;
}

Vec mse_grad(std::span<const double> theta, const Mat& inputs, std::span<const double> labels) {
    require(labels.size() >= 1, "mse_grad: empty batch");
    require(inputs.rows() == labels.size(), "mse_grad: inputs and labels disagree on batch size");
    require(inputs.cols() == theta.size(), "mse_grad: input dimension does not match theta");
    const std::size_t p = theta.size();
    Vec g(p, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto row = inputs.data().subspan(i * p, p);
        const double r = 2.0 * (dot(theta, row) - labels[i]);
        for (std::size_t j = 0; j < p; ++j) g[j] += r * row[j];
    }
    const double inv = 1.0 / static_cast<double>(labels.size());
    for (double& v : g) v *= inv;
    return g;
}

Mat expected_grad_matrix(std::span<const double> mean, double cov_scale, bool append_bias) {
    require(!mean.empty(), "expected_grad_matrix: empty mean");
    require(cov_scale >= 0.0, "expected_grad_matrix: cov_scale must be >= 0");
    const std::size_t d = mean.size();
    const std::size_t p = d + (append_bias ? 1 : 0);
    Vec m(mean.begin(), mean.end());
    if (append_bias) m.push_back(1.0);
    Mat b(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) b(i, j) = 2.0 * m[i] * m[j];
        if (i < d) b(i, i) += 2.0 * cov_scale;
    }
    return b;
}

Mat expected_grad_matrix(CovariateProcess& proc, std::uint64_t k, Rng& rng) {
    const Vec m = proc.mean().mean_at(k, rng);
    return expected_grad_matrix(m, proc.cov_scale(), proc.append_bias());
}

Mat expected_grad_matrix_continuous(const CovariateProcess& proc, double t, double eta) {
    const Vec m = proc.mean().mean_continuous(t, eta);
    return expected_grad_matrix(m, proc.cov_scale(), proc.append_bias());
}

double distance_to_target(std::span<const double> theta, std::span<const double> theta_star) {
    require(theta.size() == theta_star.size(), "distance_to_target: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double d = theta[i] - theta_star[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace resonance
