#include "resonance/optim.hpp"

#include <cmath>

#include "resonance/error.hpp"

namespace resonance {

namespace {

bool finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool blown_up(std::span<const double> theta) {
    double s = 0.0;
    for (double x : theta) s += x * x;
    return !std::isfinite(s) || std::sqrt(s) > kDivergenceNorm;
}

}  // namespace

SgdmState SgdmState::start(Vec theta0, double eta, double mu) {
    require(eta > 0.0, "SGDm: eta must be positive");
    require(mu >= 0.0 && mu < 1.0, "SGDm: mu must lie in [0, 1)");
    SgdmState s;
    s.v.assign(theta0.size(), 0.0);
    s.theta = std::move(theta0);
    s.eta = eta;
    s.mu = mu;
    return s;
}

AdamState AdamState::start(Vec theta0, double eta, double beta1, double beta2, double eps_hat) {
    require(eta > 0.0, "ADAM: eta must be positive");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "ADAM: betas must lie in [0, 1)");
    AdamState s;
    s.m.assign(theta0.size(), 0.0);
    s.s.assign(theta0.size(), 0.0);
    s.theta = std::move(theta0);
    s.eta = eta;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps_hat = eps_hat;
    return s;
}

SgdmState sgdm_step(SgdmState state, std::span<const double> grad) {
    require(grad.size() == state.theta.size(), "sgdm_step: gradient dimension mismatch");
    if (state.divergence.diverged) return state;
    const std::uint64_t index = state.steps++;
    if (!finite(grad)) {
        state.divergence = {true, index};
        return state;
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.v[i] = state.mu * state.v[i] - state.eta * grad[i];
        state.theta[i] += state.v[i];
    }
    if (blown_up(state.theta)) state.divergence = {true, index};
    return state;
}

AdamState adam_step(AdamState state, std::span<const double> grad) {
    require(grad.size() == state.theta.size(), "adam_step: gradient dimension mismatch");
    if (state.divergence.diverged) return state;
    const std::uint64_t index = state.steps++;
    if (!finite(grad)) {
        state.divergence = {true, index};
        return state;
    }
    const double t = static_cast<double>(state.steps);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.s[i] = state.beta2 * state.s[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / c1;
        const double s_hat = state.s[i] / c2;
        state.theta[i] -= state.eta * m_hat / (std::sqrt(s_hat) + state.eps_hat);
    }
    if (blown_up(state.theta)) state.divergence = {true, index};
    return state;
}

PhaseVector split_step(const PhaseVector& x, const Mat& b, double alpha, double h) {
    const std::size_t d = x.dim();
    require(x.xi.size() == 2 * d && d > 0, "split_step: phase vector must have two equal blocks");
    require(b.rows() == d && b.cols() == d, "split_step: B does not match the block dimension");
    const auto e = x.displacement();
    const auto vel = x.velocity();
    PhaseVector out{Vec(2 * d)};
    // explicit Euler on [0 0; −B −αI]
    for (std::size_t i = 0; i < d; ++i) {
        double force = 0.0;
        for (std::size_t j = 0; j < d; ++j) force += b(i, j) * e[j];
        out.xi[d + i] = vel[i] + h * (-force - alpha * vel[i]);
    }
    // implicit Euler on [0 I; 0 0]: the position update sees the new velocity
    for (std::size_t i = 0; i < d; ++i) out.xi[i] = e[i] + h * out.xi[d + i];
    return out;
}

PhaseVector split_step_sgdm(const PhaseVector& x, const Mat& b, double mu, double eta) {
    require(eta > 0.0, "split_step: eta must be positive");
    const double h = std::sqrt(eta);
    return split_step(x, b, (1.0 - mu) / h, h);
}

}  // namespace resonance
