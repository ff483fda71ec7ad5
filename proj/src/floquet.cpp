#include "resonance/floquet.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "resonance/error.hpp"
#include "resonance/parallel.hpp"
#include "resonance/tasks.hpp"

namespace resonance {

LtvField assemble_A(GradMatrixFn bfun, double mu, double eta) {
    require(eta > 0.0, "assemble_A: eta must be positive");
    require(mu >= 0.0 && mu <= 1.0, "assemble_A: mu must lie in [0, 1]");
    const double alpha = (1.0 - mu) / std::sqrt(eta);
    return [bfun = std::move(bfun), alpha](double t, Mat& a) {
        const Mat b = bfun(t);
        require(b.square(), "assemble_A: B(t) must be square");
        const std::size_t d = b.rows();
        if (a.rows() != 2 * d || a.cols() != 2 * d) a = Mat(2 * d, 2 * d);
        for (double& v : a.data()) v = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            a(i, d + i) = 1.0;
            for (std::size_t j = 0; j < d; ++j) a(d + i, j) = -b(i, j);
            a(d + i, d + i) = -alpha;
        }
    };
}

double OscillatorSystem::alpha() const { return (1.0 - mu) / std::sqrt(eta); }

double continuous_period(const MeanSignal& mean, double eta) {
    require(eta > 0.0, "continuous_period: eta must be positive");
    if (mean.is_constant_zero()) return 0.0;
    if (const auto* s = std::get_if<Sinusoid>(&mean.spec())) return std::sqrt(eta) / s->freq;
    if (const auto* s = std::get_if<SquareWave>(&mean.spec())) return std::sqrt(eta) * s->period;
    fail(ErrorCode::InvalidArgument, "continuous_period: only deterministic periodic means have a period");
}

OscillatorSystem make_system(const CovariateProcess& proc, double mu, double eta) {
    require(proc.mean().deterministic(), "make_system: covariate mean must be deterministic");
    const double period = continuous_period(proc.mean(), eta);
    require(period > 0.0, "make_system: constant mean has no period (use the constant-B path)");

    OscillatorSystem sys;
    sys.bfun = [proc, eta](double t) { return expected_grad_matrix_continuous(proc, t, eta); };
    sys.mu = mu;
    sys.eta = eta;
    sys.dim = proc.sample_dim();
    sys.period_ct = period;

    for (int i = 0; i < 100; ++i) {
        const double t = (i + 0.37) * period / 100.0;
        const Mat b0 = sys.bfun(t);
        const Mat b1 = sys.bfun(t + period);
        const auto d0 = b0.data();
        const auto d1 = b1.data();
        for (std::size_t j = 0; j < d0.size(); ++j)
            if (std::abs(d0[j] - d1[j]) > 1e-9)
                fail(ErrorCode::InvalidArgument, "make_system: B(t) is not periodic with the derived period");
    }
    return sys;
}

double default_h_ode(double period_ct) {
    require(period_ct > 0.0, "default_h_ode: period must be positive");
    return period_ct / std::max(1000.0, 100.0 * period_ct);
}

Mat monodromy(const OscillatorSystem& sys, double h_ode) {
    require(sys.period_ct > 0.0, "monodromy: period must be positive");
    require(h_ode > 0.0 && h_ode <= sys.period_ct / 100.0 * (1.0 + 1e-12),
            "monodromy: h_ode must satisfy 0 < h_ode <= period/100");
    const auto res = rk4_ltv_matrix(sys.field(), Mat::identity(2 * sys.dim), 0.0, sys.period_ct, h_ode);
    if (res.diverged) {
        std::ostringstream os;
        os << "monodromy: integration went non-finite at t=" << res.diverged_at << " (h_ode=" << h_ode
           << ", period=" << sys.period_ct << ")";
        fail(ErrorCode::Diverged, os.str());
    }
    return res.state;
}

StabilityClass classify(double rho, double marginal_band) {
    if (std::abs(rho - 1.0) <= marginal_band) return StabilityClass::Marginal;
    return rho > 1.0 ? StabilityClass::Diverges : StabilityClass::Converges;
}

StabilityVerdict stability(const OscillatorSystem& sys, double h_ode, double marginal_band) {
    const double rho = spectral_radius(eigvals(monodromy(sys, h_ode)));
    return {rho, classify(rho, marginal_band)};
}

double theory_rho(const CovariateProcess& proc, double mu, double eta, double h_ode) {
    if (proc.mean().is_constant_zero()) {
        const Vec zero(proc.dim(), 0.0);
        const Mat b = expected_grad_matrix(zero, proc.cov_scale(), proc.append_bias());
        Mat a;
        assemble_A([b](double) { return b; }, mu, eta)(0.0, a);
        return spectral_radius(eigvals(expm(a, 1.0)));
    }
    const OscillatorSystem sys = make_system(proc, mu, eta);
    return stability(sys, h_ode > 0.0 ? h_ode : default_h_ode(sys.period_ct)).rho;
}

HeatmapGrid theory_heatmap(double eta, const std::vector<double>& mu_grid, const std::vector<double>& axis_grid,
                           const std::string& axis_name, const ProcessFactory& factory, double h_ode,
                           std::size_t workers) {
    require(!mu_grid.empty() && !axis_grid.empty(), "theory_heatmap: grids must be non-empty");
    HeatmapGrid grid("mu", mu_grid, axis_name, axis_grid, "theory_rho");
    std::vector<std::optional<std::string>> errors(grid.values.size());
    parallel_for(grid.values.size(), workers, [&](std::size_t idx) {
        const std::size_t r = idx / grid.cols();
        const std::size_t c = idx % grid.cols();
        try {
            grid.values[idx] = theory_rho(factory(axis_grid[c]), mu_grid[r], eta, h_ode);
        } catch (const std::exception& e) {
            grid.values[idx] = std::nan("");
            errors[idx] = e.what();
        }
    });
    for (std::size_t idx = 0; idx < errors.size(); ++idx)
        if (errors[idx]) grid.failures.push_back({idx / grid.cols(), idx % grid.cols(), *errors[idx]});
    return grid;
}

}  // namespace resonance
