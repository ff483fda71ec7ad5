#include <cmath>
#include <numbers>

#include "doctest.h"
#include "resonance/error.hpp"
#include "resonance/floquet.hpp"
#include "resonance/tasks.hpp"

using namespace resonance;

namespace {

OscillatorSystem mathieu(double delta, double eps, double damping) {
    // θ'' + 2ζθ' + (δ + ε cos t)θ = 0 written with α = (1 − μ)/√η and η = 1.
    return {[=](double t) { return Mat{{delta + eps * std::cos(t)}}; }, 1.0 - 2.0 * damping, 1.0, 1,
            2.0 * std::numbers::pi};
}

double det2(const Mat& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

}  // namespace

TEST_CASE("A(t) has the damped oscillator block form") {
    const LtvField f = assemble_A([](double) { return Mat{{3.0, 1.0}, {1.0, 2.0}}; }, 0.9, 0.04);
    Mat a;
    f(0.0, a);
    const double alpha = 0.1 / 0.2;
    const Mat want{{0, 0, 1, 0}, {0, 0, 0, 1}, {-3, -1, -alpha, 0}, {-1, -2, 0, -alpha}};
    for (std::size_t i = 0; i < 16; ++i) CHECK(a.data()[i] == doctest::Approx(want.data()[i]));
}

TEST_CASE("constant underdamped oscillator decays at exp(-alpha T / 2)") {
    OscillatorSystem sys{[](double) { return Mat{{4.0}}; }, 0.9, 0.01, 1, 2.5};
    const double alpha = 0.1 / 0.1;
    const auto v = stability(sys, default_h_ode(sys.period_ct));
    CHECK(v.rho == doctest::Approx(std::exp(-alpha * 2.5 / 2.0)).epsilon(1e-9));
    CHECK(v.cls == StabilityClass::Converges);
}

TEST_CASE("monodromy determinant obeys Liouville's formula") {
    const auto sys = mathieu(0.4, 0.3, 0.05);
    const Mat m = monodromy(sys, default_h_ode(sys.period_ct));
    CHECK(det2(m) == doctest::Approx(std::exp(-2.0 * 0.05 * sys.period_ct)).epsilon(1e-9));
}

TEST_CASE("Mathieu chart: principal tongue is unstable, its flanks are neutral") {
    // The first resonance tongue opens from δ = 1/4 with edges δ ≈ 1/4 ± ε/2.
    const double eps = 0.1;
    const auto inside = stability(mathieu(0.25, eps, 0.0), 2.0 * std::numbers::pi / 2000.0);
    CHECK(inside.cls == StabilityClass::Diverges);
    // At the tongue centre the growth rate is ≈ ε/2 per unit time.
    CHECK(std::log(inside.rho) / (2.0 * std::numbers::pi) == doctest::Approx(eps / 2.0).epsilon(0.05));
    for (double delta : {0.25 + 0.8 * eps, 0.25 - 0.8 * eps, 0.6}) {
        const auto out = stability(mathieu(delta, eps, 0.0), 2.0 * std::numbers::pi / 2000.0, 1e-6);
        CHECK(out.rho == doctest::Approx(1.0).epsilon(1e-7));
    }
    // Damping faster than the growth rate closes the tongue.
    CHECK(stability(mathieu(0.25, eps, 0.1), 2.0 * std::numbers::pi / 2000.0).cls == StabilityClass::Converges);
}

TEST_CASE("periods follow the sqrt(eta) time scale") {
    const double eta = 0.01;
    CHECK(continuous_period(MeanSignal(Sinusoid{0.5, 0.02}), eta) == doctest::Approx(0.1 / 0.02));
    CHECK(continuous_period(MeanSignal(SquareWave{30.0, {1.0}}), eta) == doctest::Approx(3.0));
    CHECK(continuous_period(MeanSignal(Sinusoid{0.5, 0.0}), eta) == 0.0);
    CHECK_THROWS_AS(continuous_period(MeanSignal(Switching{5.0, 0.1, 1}), eta), Error);
    CHECK(default_h_ode(3.0) == doctest::Approx(0.003));
    CHECK(default_h_ode(50.0) == doctest::Approx(0.01));
}

TEST_CASE("classification uses a symmetric marginal band") {
    CHECK(classify(1.05) == StabilityClass::Diverges);
    CHECK(classify(1.01) == StabilityClass::Marginal);
    CHECK(classify(0.99) == StabilityClass::Marginal);
    CHECK(classify(0.9) == StabilityClass::Converges);
    CHECK(classify(1.01, 0.0) == StabilityClass::Diverges);
}

TEST_CASE("theory heatmap cells equal theory_rho and constant cells use expm over a unit period") {
    const double eta = 0.01;
    const std::vector<double> mus{0.95, 0.99}, freqs{0.0, 0.02};
    auto factory = [](double f) { return CovariateProcess(MeanSignal(Sinusoid{0.5, f}), 1.0, true); };
    const HeatmapGrid g = theory_heatmap(eta, mus, freqs, "freq", factory, 0.0, 1);
    CHECK(g.failures.empty());
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) CHECK(g.at(r, c) == theory_rho(factory(freqs[c]), mus[r], eta));
    const Mat b = expected_grad_matrix(Vec{0.0}, 1.0, true);
    Mat a;
    assemble_A([b](double) { return b; }, 0.95, eta)(0.0, a);
    CHECK(g.at(0, 0) == doctest::Approx(spectral_radius(eigvals(expm(a, 1.0)))));
}

TEST_CASE("make_system rejects stochastic means and too-coarse steps") {
    CHECK_THROWS_AS(make_system(CovariateProcess(MeanSignal(Ar2{0.03, 0.1, 1e-5}), 1.0, true), 0.9, 0.01), Error);
    const auto sys = make_system(CovariateProcess(MeanSignal(Sinusoid{0.5, 0.01}), 1.0, true), 0.9, 0.01);
    CHECK(sys.dim == 2);
    CHECK_THROWS_AS(monodromy(sys, sys.period_ct / 10.0), Error);
}
