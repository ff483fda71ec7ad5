#include "resonance/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "resonance/error.hpp"

namespace resonance {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require(rows > 0 && cols > 0, "Mat: dimensions must be positive");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    require(rows_ > 0, "Mat: empty initializer");
    cols_ = rows.begin()->size();
    require(cols_ > 0, "Mat: empty row");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, "Mat: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(std::span<const double> d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

bool Mat::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Mat::norm1() const noexcept {
    double best = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
        best = std::max(best, s);
    }
    return best;
}

void matmul_into(const Mat& a, const Mat& b, Mat& out) {
    require(a.cols() == b.rows(), "matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                                      " vs " + std::to_string(b.rows()) + ")");
    if (out.rows() != a.rows() || out.cols() != b.cols()) out = Mat(a.rows(), b.cols());
    const std::size_t n = a.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    }
}

Mat matmul(const Mat& a, const Mat& b) {
    Mat out;
    matmul_into(a, b, out);
    return out;
}

Vec matvec(const Mat& a, std::span<const double> x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
        y[i] = s;
    }
    return y;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Mat add(const Mat& a, const Mat& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
    Mat c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
    return c;
}

Mat scale(const Mat& a, double s) {
    Mat c = a;
    for (double& v : c.data()) v *= s;
    return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Eigenvalues

namespace {

// Row/column scaling by powers of the radix so row and column norms are
// comparable; leaves the spectrum unchanged and exact in binary.
void balance(Mat& a) {
    constexpr double radix = std::numeric_limits<double>::radix;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Similarity reduction to upper Hessenberg form by stabilized elementary
// transformations (Gaussian elimination with partial pivoting).
void to_hessenberg(Mat& a) {
    const std::size_t n = a.rows();
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t piv = m;
        for (std::size_t j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        }
        if (piv != m) {
            for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x == 0.0) continue;
        for (std::size_t i = m + 1; i < n; ++i) {
            double y = a(i, m - 1);
            if (y == 0.0) continue;
            y /= x;
            a(i, m - 1) = 0.0;
            for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
            for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (destroys `a`).
ComplexSpectrum hessenberg_qr(Mat& a) {
    constexpr int kMaxIterations = 60;
    const double eps = std::numeric_limits<double>::epsilon();
    const int n = static_cast<int>(a.rows());
    ComplexSpectrum w(n);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    double t = 0.0;  // accumulated exceptional shifts
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l > 0; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                w[nn--] = {x + t, 0.0};
            } else {
                double y = a(nn - 1, nn - 1);
                double ww = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + ww;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        w[nn - 1] = w[nn] = {x + z, 0.0};
                        if (z != 0.0) w[nn] = {x - ww / z, 0.0};
                    } else {
                        w[nn] = {x + p, -z};
                        w[nn - 1] = std::conj(w[nn]);
                    }
                    nn -= 2;
                } else {
                    if (its == kMaxIterations)
                        fail(ErrorCode::NotConverged,
                             "eigvals: QR iteration did not converge after " +
                                 std::to_string(kMaxIterations) + " sweeps");
                    if (its > 0 && its % 10 == 0) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        ww = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k + 1 != nn) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k + 1 != nn) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return w;
}

}  // namespace

ComplexSpectrum eigvals(const Mat& m) {
    require(m.square(), "eigvals: matrix must be square");
    require(m.rows() <= 64, "eigvals: dimension above 64 is out of range");
    require(m.all_finite(), "eigvals: matrix has non-finite entries");
    if (m.rows() == 1) return {{m(0, 0), 0.0}};
    Mat a = m;
    balance(a);
    to_hessenberg(a);
    return hessenberg_qr(a);
}

double spectral_radius(const ComplexSpectrum& s) {
    require(!s.empty(), "spectral_radius: empty spectrum");
    double r = 0.0;
    for (const auto& z : s) r = std::max(r, std::abs(z));
    return r;
}

// ---------------------------------------------------------------------------
// Matrix exponential

Mat expm(const Mat& m, double t) {
    require(m.square(), "expm: matrix must be square");
    const std::size_t n = m.rows();
    Mat a = scale(m, t);
    const double nrm = a.norm1();
    int squarings = 0;
    if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    a = scale(a, std::ldexp(1.0, -squarings));

    // Taylor series; with ||a|| <= 1/2 the terms fall below 2^-k / k!.
    Mat sum = Mat::identity(n);
    Mat term = Mat::identity(n);
    Mat tmp(n, n);
    for (int k = 1; k <= 30; ++k) {
        matmul_into(term, a, tmp);
        term = scale(tmp, 1.0 / k);
        sum = add(sum, term);
        if (term.norm1() <= 1e-18 * sum.norm1()) break;
    }
    for (int i = 0; i < squarings; ++i) {
        matmul_into(sum, sum, tmp);
        std::swap(sum, tmp);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// RK4

namespace {

std::size_t step_count(double t0, double t1, double h) {
    require(t1 > t0, "rk4_ltv: requires t1 > t0");
    require(h > 0.0 && std::isfinite(h), "rk4_ltv: step must be positive");
    const double ratio = (t1 - t0) / h;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-9)));
}

}  // namespace

Rk4Result rk4_ltv(const std::function<Mat(double)>& a, std::span<const double> x0, double t0,
                  double t1, double h) {
    LtvField field = [&a](double t, Mat& out) { out = a(t); };
    return rk4_ltv(field, x0, t0, t1, h);
}

Rk4Result rk4_ltv(const LtvField& a, std::span<const double> x0, double t0, double t1, double h) {
    Mat x(x0.size(), 1);
    std::copy(x0.begin(), x0.end(), x.data().begin());
    auto res = rk4_ltv_matrix(a, x, t0, t1, h);
    Rk4Result out;
    out.state.assign(res.state.data().begin(), res.state.data().end());
    out.diverged = res.diverged;
    out.diverged_at = res.diverged_at;
    return out;
}

Rk4MatrixResult rk4_ltv_matrix(const LtvField& field, const Mat& x0, double t0, double t1, double h) {
    require(x0.rows() > 0, "rk4_ltv: empty state");
    const std::size_t steps = step_count(t0, t1, h);
    const std::size_t n = x0.rows();
    const std::size_t c = x0.cols();

    Mat a(n, n), x = x0, k1(n, c), k2(n, c), k3(n, c), k4(n, c), stage(n, c);
    auto axpy = [](const Mat& base, double s, const Mat& k, Mat& out) {
        auto bd = base.data();
        auto kd = k.data();
        auto od = out.data();
        for (std::size_t i = 0; i < od.size(); ++i) od[i] = bd[i] + s * kd[i];
    };
    auto eval = [&](double t, const Mat& state, Mat& out) {
        field(t, a);
        require(a.rows() == n && a.cols() == n, "rk4_ltv: A(t) does not match state dimension");
        matmul_into(a, state, out);
    };

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        const double hi = (i + 1 == steps) ? (t1 - t) : h;
        eval(t, x, k1);
        axpy(x, 0.5 * hi, k1, stage);
        eval(t + 0.5 * hi, stage, k2);
        axpy(x, 0.5 * hi, k2, stage);
        eval(t + 0.5 * hi, stage, k3);
        axpy(x, hi, k3, stage);
        eval(t + hi, stage, k4);
        auto xd = x.data();
        auto d1 = k1.data(), d2 = k2.data(), d3 = k3.data(), d4 = k4.data();
        for (std::size_t j = 0; j < xd.size(); ++j)
            xd[j] += hi / 6.0 * (d1[j] + 2.0 * d2[j] + 2.0 * d3[j] + d4[j]);
        if (!x.all_finite()) return {x, true, t};
    }
    return {x, false, 0.0};
}

}  // namespace resonance
