#include "tinyol/frozen_model.hpp"

#include <algorithm>
#include <cmath>

namespace tinyol {

FrozenModel::FrozenModel(std::vector<Layer> layers, std::size_t embedding_index)
    : layers_(std::move(layers)), embedding_index_(embedding_index) {
    if (layers_.empty()) throw ShapeError("model must have at least one layer");
    if (embedding_index_ >= layers_.size())
        throw ShapeError("embedding_index " + std::to_string(embedding_index_) +
                         " out of range for " + std::to_string(layers_.size()) + " layers");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& l = layers_[i];
        if (l.W.v.size() != l.W.rows * l.W.cols || l.b.size() != l.W.rows)
            throw ShapeError("layer " + std::to_string(i) + " has inconsistent dims");
        if (i > 0 && layers_[i - 1].W.rows != l.W.cols)
            throw ShapeError("layer " + std::to_string(i) + " in-dim " + std::to_string(l.W.cols) +
                             " does not chain from previous out-dim " +
                             std::to_string(layers_[i - 1].W.rows));
    }
}

Vec FrozenModel::run_prefix(const Vec& x, std::size_t n_layers) const {
    Vec cur = x;
    for (std::size_t i = 0; i < n_layers; ++i)
        cur = dense_forward(layers_[i].W, layers_[i].b, cur, layers_[i].act);
    return cur;
}

Vec FrozenModel::forward(const Vec& x) const {
    return run_prefix(x, layers_.size());
}

Vec FrozenModel::encode(const Vec& x) const {
    return run_prefix(x, embedding_index_ + 1);
}

Vec FrozenModel::forward_truncated(const Vec& x) const {
    if (layers_.size() < 2)
        throw UnsupportedError("forward_truncated needs at least 2 layers");
    return run_prefix(x, layers_.size() - 1);
}

float reconstruction_error(const Vec& x, const Vec& x_hat) {
    if (x.size() != x_hat.size())
        throw ShapeError("reconstruction_error: " + std::to_string(x.size()) + " vs " +
                         std::to_string(x_hat.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = static_cast<double>(x[i]) - static_cast<double>(x_hat[i]);
        acc += d * d;
    }
    return static_cast<float>(acc / static_cast<double>(x.size()));
}

Vec Preproc::apply(const StreamWindow& w) const {
    w.check_shape();
    float span = minmax_hi - minmax_lo;
    Vec out(kWindowLen);
    for (std::size_t t = 0; t < kWindowLen; ++t) {
        float s = 0.0f;
        for (std::size_t a = 0; a < kAxes; ++a) s += pca_axis[a] * (w.at(t, a) - pca_mean[a]);
        out[t] = std::clamp((s - minmax_lo) / span, 0.0f, 1.0f);
    }
    return out;
}

}  // namespace tinyol
