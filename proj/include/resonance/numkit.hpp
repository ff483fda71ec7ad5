#pragma once

// Dense real linear algebra for the small systems used throughout the library:
// row-major matrices, the complex spectrum of a real matrix, the matrix
// exponential, and fixed-step RK4 for linear time-varying systems.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace resonance {

using Vec = std::vector<double>;

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(std::size_t n);
    static Mat diag(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool all_finite() const noexcept;
    double norm1() const noexcept;  // max column sum

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using ComplexSpectrum = std::vector<std::complex<double>>;

// Inner index summed left to right, so results are bit-stable across runs.
Mat matmul(const Mat& a, const Mat& b);
void matmul_into(const Mat& a, const Mat& b, Mat& out);
Vec matvec(const Mat& a, std::span<const double> x);
Mat transpose(const Mat& a);
Mat add(const Mat& a, const Mat& b);
Mat scale(const Mat& a, double s);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Full complex spectrum via balancing, Hessenberg reduction and Francis
/// double-shift QR. Throws Error(NotConverged) rather than returning a
/// partial spectrum.
ComplexSpectrum eigvals(const Mat& m);

double spectral_radius(const ComplexSpectrum& s);

/// exp(m * t) by scaling and squaring over a truncated Taylor series.
Mat expm(const Mat& m, double t);

// A(t) written into a caller-owned matrix; avoids an allocation per stage.
using LtvField = std::function<void(double t, Mat& a)>;

struct Rk4Result {
    Vec state;
    bool diverged = false;
    double diverged_at = 0.0;  // time of the first non-finite stage
};

/// Classical RK4 on x' = A(t) x from t0 to t1 with fixed step h; the last
/// step is shortened to land exactly on t1.
Rk4Result rk4_ltv(const std::function<Mat(double)>& a, std::span<const double> x0, double t0,
                  double t1, double h);
Rk4Result rk4_ltv(const LtvField& a, std::span<const double> x0, double t0, double t1, double h);

struct Rk4MatrixResult {
    Mat state;
    bool diverged = false;
    double diverged_at = 0.0;
};

/// Same scheme applied to the matrix ODE X' = A(t) X (all columns at once).
Rk4MatrixResult rk4_ltv_matrix(const LtvField& a, const Mat& x0, double t0, double t1, double h);

}  // namespace resonance
