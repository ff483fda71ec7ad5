#include "resonance/mlp.hpp"

#include <cmath>

#include "resonance/error.hpp"

namespace resonance {

MlpParams::MlpParams(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
    require(widths_.size() >= 2, "MlpParams: need at least input and output widths");
    require(widths_.back() == 1, "MlpParams: output must be scalar");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        require(widths_[l] >= 1 && widths_[l + 1] >= 1, "MlpParams: layer widths must be positive");
        offsets_.push_back(total);
        total += widths_[l + 1] * widths_[l] + widths_[l + 1];
    }
    flat_.assign(total, 0.0);
}

std::span<double> MlpParams::weights(std::size_t layer) {
    return std::span(flat_).subspan(offsets_.at(layer), widths_[layer + 1] * widths_[layer]);
}
std::span<const double> MlpParams::weights(std::size_t layer) const {
    return std::span(flat_).subspan(offsets_.at(layer), widths_[layer + 1] * widths_[layer]);
}
std::span<double> MlpParams::biases(std::size_t layer) {
    return std::span(flat_).subspan(offsets_.at(layer) + widths_[layer + 1] * widths_[layer], widths_[layer + 1]);
}
std::span<const double> MlpParams::biases(std::size_t layer) const {
    return std::span(flat_).subspan(offsets_.at(layer) + widths_[layer + 1] * widths_[layer], widths_[layer + 1]);
}

void he_init(MlpParams& params, Rng& rng) {
    for (std::size_t l = 0; l < params.layers(); ++l) {
        const double sd = std::sqrt(2.0 / static_cast<double>(params.widths()[l]));
        for (double& w : params.weights(l)) w = rng.normal(0.0, sd);
        for (double& b : params.biases(l)) b = 0.0;
    }
}

MlpParams he_init(std::size_t d_in, Rng& rng) {
    require(d_in >= 1, "he_init: d_in must be >= 1");
    MlpParams p = MlpParams::standard(d_in);
    he_init(p, rng);
    return p;
}

namespace {

// Pre-activations z and activations a for every layer; a[0] is the input.
struct Trace {
    std::vector<Vec> z;
    std::vector<Vec> a;
};

void run_forward(const MlpParams& p, std::span<const double> x, Trace& tr) {
    require(x.size() == p.input_dim(), "forward: input dimension mismatch");
    const std::size_t L = p.layers();
    tr.z.resize(L);
    tr.a.resize(L + 1);
    tr.a[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t in = p.widths()[l];
        const std::size_t out = p.widths()[l + 1];
        const auto w = p.weights(l);
        const auto b = p.biases(l);
        Vec& z = tr.z[l];
        Vec& a = tr.a[l + 1];
        z.resize(out);
        a.resize(out);
        const Vec& prev = tr.a[l];
        for (std::size_t i = 0; i < out; ++i) {
            double s = b[i];
            for (std::size_t j = 0; j < in; ++j) s += w[i * in + j] * prev[j];
            z[i] = s;
            a[i] = (l + 1 == L) ? s : std::max(0.0, s);
        }
    }
}

}  // namespace

double forward(const MlpParams& params, std::span<const double> x) {
    Trace tr;
    run_forward(params, x, tr);
    return tr.a.back()[0];
}

Vec grad(const MlpParams& params, const Mat& inputs, std::span<const double> labels) {
    require(!labels.empty(), "grad: empty batch");
    require(inputs.rows() == labels.size(), "grad: inputs and labels disagree on batch size");
    require(inputs.cols() == params.input_dim(), "grad: input dimension mismatch");

    MlpParams g(params.widths());
    const std::size_t L = params.layers();
    const double inv_n = 1.0 / static_cast<double>(labels.size());
    Trace tr;
    Vec delta, next;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        run_forward(params, inputs.data().subspan(s * inputs.cols(), inputs.cols()), tr);
        delta.assign(1, 2.0 * (tr.a.back()[0] - labels[s]) * inv_n);
        for (std::size_t l = L; l-- > 0;) {
            const std::size_t in = params.widths()[l];
            const std::size_t out = params.widths()[l + 1];
            if (l + 1 != L)
                for (std::size_t i = 0; i < out; ++i)
                    if (tr.z[l][i] <= 0.0) delta[i] = 0.0;
            auto gw = g.weights(l);
            auto gb = g.biases(l);
            const Vec& prev = tr.a[l];
            for (std::size_t i = 0; i < out; ++i) {
                gb[i] += delta[i];
                for (std::size_t j = 0; j < in; ++j) gw[i * in + j] += delta[i] * prev[j];
            }
            if (l == 0) break;
            const auto w = params.weights(l);
            next.assign(in, 0.0);
            for (std::size_t i = 0; i < out; ++i)
                for (std::size_t j = 0; j < in; ++j) next[j] += w[i * in + j] * delta[i];
            delta.swap(next);
        }
    }
    return Vec(g.flat().begin(), g.flat().end());
}

double mse_loss(const MlpParams& params, const Mat& inputs, std::span<const double> labels) {
    require(!labels.empty() && inputs.rows() == labels.size(), "mse_loss: bad batch");
    double s = 0.0;
    Trace tr;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        run_forward(params, inputs.data().subspan(i * inputs.cols(), inputs.cols()), tr);
        const double r = tr.a.back()[0] - labels[i];
        s += r * r;
    }
    return s / static_cast<double>(labels.size());
}

}  // namespace resonance
