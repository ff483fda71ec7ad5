#pragma once

#include <span>
#include <vector>

#include "resonance/numkit.hpp"
#include "resonance/rng.hpp"

namespace resonance {

/// Fully connected ReLU network with scalar output. Parameters live in one
/// flat vector, layer by layer: W (out × in, row-major) followed by b (out).
class MlpParams {
public:
    explicit MlpParams(std::vector<std::size_t> widths);  // {d_in, hidden..., 1}

    static MlpParams standard(std::size_t d_in) { return MlpParams({d_in, 20, 20, 1}); }

    const std::vector<std::size_t>& widths() const noexcept { return widths_; }
    std::size_t layers() const noexcept { return widths_.size() - 1; }
    std::size_t input_dim() const noexcept { return widths_.front(); }

    std::span<double> flat() noexcept { return flat_; }
    std::span<const double> flat() const noexcept { return flat_; }

    std::span<double> weights(std::size_t layer);
    std::span<const double> weights(std::size_t layer) const;
    std::span<double> biases(std::size_t layer);
    std::span<const double> biases(std::size_t layer) const;

private:
    std::vector<std::size_t> widths_;
    std::vector<std::size_t> offsets_;  // start of W for each layer
    Vec flat_;
};

/// Weights ~ N(0, 2/fan_in), biases 0.
MlpParams he_init(std::size_t d_in, Rng& rng);
void he_init(MlpParams& params, Rng& rng);

double forward(const MlpParams& params, std::span<const double> x);

/// Gradient of (1/n) Σ (f(x_i) − y_i)² w.r.t. the flat parameters; the ReLU
/// derivative at exactly 0 is taken as 0.
Vec grad(const MlpParams& params, const Mat& inputs, std::span<const double> labels);

double mse_loss(const MlpParams& params, const Mat& inputs, std::span<const double> labels);

}  // namespace resonance
