#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "resonance/error.hpp"
#include "resonance/processes.hpp"

namespace resonance {

namespace {

// FFTW's planner is not thread-safe; execution of a private plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), reinterpret_cast<fftw_complex*>(out_.get()),
                                     FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    double* input() noexcept { return in_.get(); }
    void execute() noexcept { fftw_execute(plan_); }
    double power(std::size_t k) const noexcept {
        const auto* o = reinterpret_cast<const fftw_complex*>(out_.get());
        return o[k][0] * o[k][0] + o[k][1] * o[k][1];
    }

private:
    std::size_t n_;
    std::unique_ptr<double, FftwFree> in_;
    std::unique_ptr<void, FftwFree> out_;
    fftw_plan plan_{};
};

}  // namespace

std::vector<PsdPoint> psd(std::span<const double> series, std::size_t segment_len, double overlap) {
    require(segment_len >= 16, "psd: segment length must be at least 16");
    require(series.size() >= segment_len, "psd: series shorter than one segment");
    require(overlap >= 0.0 && overlap < 1.0, "psd: overlap must lie in [0, 1)");

    const std::size_t hop = std::max<std::size_t>(
        1, segment_len - static_cast<std::size_t>(std::floor(overlap * static_cast<double>(segment_len))));
    Vec window(segment_len);
    double wsum2 = 0.0;
    for (std::size_t i = 0; i < segment_len; ++i) {
        // periodic Hann
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(segment_len));
        wsum2 += window[i] * window[i];
    }

    const std::size_t bins = segment_len / 2 + 1;
    Vec acc(bins, 0.0);
    RealFft fft(segment_len);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + segment_len <= series.size(); start += hop) {
        double mean = 0.0;
        for (std::size_t i = 0; i < segment_len; ++i) mean += series[start + i];
        mean /= static_cast<double>(segment_len);
        double* in = fft.input();
        for (std::size_t i = 0; i < segment_len; ++i) in[i] = (series[start + i] - mean) * window[i];
        fft.execute();
        for (std::size_t k = 0; k < bins; ++k) acc[k] += fft.power(k);
        ++segments;
    }

    std::vector<PsdPoint> out(bins);
    const double base = 1.0 / (wsum2 * static_cast<double>(segments));
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (segment_len % 2 == 0 && k == bins - 1);
        out[k] = {static_cast<double>(k) / static_cast<double>(segment_len), acc[k] * base * (edge ? 1.0 : 2.0)};
    }
    return out;
}

}  // namespace resonance
