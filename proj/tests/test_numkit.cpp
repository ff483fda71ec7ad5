#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "resonance/error.hpp"
#include "resonance/numkit.hpp"
#include "resonance/rng.hpp"

using namespace resonance;
using cd = std::complex<double>;

namespace {

// Characteristic polynomial coefficients c[0..n] (monic, c[n] = 1) by
// Faddeev–LeVerrier.
std::vector<double> char_poly(const Mat& a) {
    const std::size_t n = a.rows();
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    Mat m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        Mat am = matmul(a, m);
        for (std::size_t i = 0; i < n; ++i) am(i, i) += c[n - k + 1];
        m = am;
        const Mat amk = matmul(a, m);
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += amk(i, i);
        c[n - k] = -tr / static_cast<double>(k);
    }
    return c;
}

// Durand–Kerner simultaneous root iteration for a monic polynomial.
std::vector<cd> durand_kerner(const std::vector<double>& c) {
    const std::size_t n = c.size() - 1;
    auto p = [&](cd z) {
        cd v = 1.0;
        for (std::size_t i = n; i-- > 0;) v = v * z + c[i];
        return v;
    };
    std::vector<cd> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(cd(0.4, 0.9), static_cast<double>(i));
    for (int it = 0; it < 5000; ++it) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cd den = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            const cd step = p(z[i]) / den;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-15) break;
    }
    return z;
}

double set_distance(const ComplexSpectrum& a, const std::vector<cd>& b) {
    double worst = 0.0;
    for (const auto& x : a) {
        double best = 1e300;
        for (const auto& y : b) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

Mat random_mat(std::size_t n, Rng& rng) {
    Mat m(n, n);
    for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
    return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return d;
}

}  // namespace

TEST_CASE("eigvals of a 2x2 match the quadratic formula") {
    const Mat m{{1.0, 2.0}, {-3.0, 0.5}};
    const double tr = 1.5, det = 0.5 + 6.0;
    const cd disc = std::sqrt(cd(tr * tr - 4.0 * det));
    const std::vector<cd> want{(tr + disc) / 2.0, (tr - disc) / 2.0};
    const auto got = eigvals(m);
    REQUIRE(got.size() == 2);
    CHECK(set_distance(got, want) < 1e-12);
}

TEST_CASE("eigvals agree with Durand-Kerner on random matrices") {
    Rng rng(1);
    for (std::size_t n : {3, 4, 5, 6}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Mat m = random_mat(n, rng);
            const auto got = eigvals(m);
            const auto want = durand_kerner(char_poly(m));
            REQUIRE(got.size() == n);
            CHECK(set_distance(got, want) < 1e-8);
        }
    }
}

TEST_CASE("eigvals handles diagonal, triangular and badly scaled input") {
    const auto d = eigvals(Mat{{3.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 2.0}});
    CHECK(set_distance(d, {3.0, -1.0, 2.0}) < 1e-14);
    const auto t = eigvals(Mat{{1.0, 5.0, 7.0}, {0.0, 2.0, 9.0}, {0.0, 0.0, 3.0}});
    CHECK(set_distance(t, {1.0, 2.0, 3.0}) < 1e-12);
    const auto s = eigvals(Mat{{1.0, 1e6}, {1e-6, 1.0}});
    CHECK(set_distance(s, {2.0, 0.0}) < 1e-9);
    CHECK(spectral_radius(eigvals(Mat{{0.0, -2.0}, {2.0, 0.0}})) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eigvals rejects non-square and non-finite input") {
    CHECK_THROWS_AS(eigvals(Mat(2, 3)), Error);
    CHECK_THROWS_AS(eigvals(Mat{{1.0, NAN}, {0.0, 1.0}}), Error);
}

TEST_CASE("expm matches a long Taylor series and the rotation closed form") {
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat a = scale(random_mat(4, rng), 0.5);
        Mat sum = Mat::identity(4), term = Mat::identity(4);
        for (int k = 1; k < 60; ++k) {
            term = scale(matmul(term, a), 1.0 / k);
            sum = add(sum, term);
        }
        CHECK(max_abs_diff(expm(a, 1.0), sum) < 1e-13);
    }
    const double t = 12.3;
    const Mat r = expm(Mat{{0.0, 1.0}, {-1.0, 0.0}}, t);
    CHECK(r(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-12));
    CHECK(r(0, 1) == doctest::Approx(std::sin(t)).epsilon(1e-12));
}

TEST_CASE("expm is a one-parameter group") {
    Rng rng(3);
    const Mat a = scale(random_mat(4, rng), 3.0);
    const Mat lhs = expm(a, 0.7);
    const Mat rhs = matmul(expm(a, 0.3), expm(a, 0.4));
    double scale_ref = 0.0;
    for (double v : lhs.data()) scale_ref = std::max(scale_ref, std::abs(v));
    CHECK(max_abs_diff(lhs, rhs) < 1e-12 * scale_ref);
    CHECK(max_abs_diff(expm(a, 0.0), Mat::identity(4)) == 0.0);
}

TEST_CASE("rk4 solves scalar decay and shows fourth-order convergence") {
    const LtvField f = [](double, Mat& a) { a = Mat{{-1.0}}; };
    auto err = [&](double h) { return std::abs(rk4_ltv(f, Vec{1.0}, 0.0, 1.0, h).state[0] - std::exp(-1.0)); };
    CHECK(err(0.01) < 1e-10);
    const double ratio = err(0.1) / err(0.05);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("rk4 integrates a time-varying system and lands exactly on t1") {
    // x' = t x has x(t) = exp(t²/2).
    const LtvField f = [](double t, Mat& a) { a = Mat{{t}}; };
    const auto r = rk4_ltv(f, Vec{1.0}, 0.0, 1.0, 0.03);
    CHECK_FALSE(r.diverged);
    CHECK(r.state[0] == doctest::Approx(std::exp(0.5)).epsilon(1e-8));
}

TEST_CASE("rk4 matrix form matches column-by-column integration") {
    const LtvField f = [](double t, Mat& a) { a = Mat{{0.0, 1.0}, {-(1.0 + 0.3 * std::cos(t)), -0.1}}; };
    const auto m = rk4_ltv_matrix(f, Mat::identity(2), 0.0, 2.0, 0.01);
    for (std::size_t c = 0; c < 2; ++c) {
        Vec e(2, 0.0);
        e[c] = 1.0;
        const auto col = rk4_ltv(f, e, 0.0, 2.0, 0.01);
        CHECK(col.state[0] == doctest::Approx(m.state(0, c)).epsilon(1e-14));
        CHECK(col.state[1] == doctest::Approx(m.state(1, c)).epsilon(1e-14));
    }
}

TEST_CASE("rk4 reports divergence instead of returning non-finite state") {
    const LtvField f = [](double, Mat& a) { a = Mat{{1e3}}; };
    const auto r = rk4_ltv(f, Vec{1.0}, 0.0, 10.0, 0.1);
    CHECK(r.diverged);
    CHECK(r.diverged_at > 0.0);
}

TEST_CASE("matrix helpers") {
    const Mat a{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(matmul(a, Mat::identity(2)) == a);
    CHECK(transpose(a) == Mat{{1.0, 3.0}, {2.0, 4.0}});
    CHECK(matvec(a, Vec{1.0, -1.0}) == Vec{-1.0, -1.0});
    CHECK(a.norm1() == 6.0);
    CHECK(norm2(Vec{3.0, 4.0}) == 5.0);
    CHECK_THROWS_AS(matmul(a, Mat(3, 1)), Error);
}
