#pragma once

#include <cstdint>
#include <vector>

#include "tinyol/numeric.hpp"
#include "tinyol/window.hpp"

namespace tinyol {

struct Layer {
    Mat W;
    Vec b;
    Activation act = Activation::Identity;
};

// Immutable dense network, the flashed-C-array analogue. No public
// operation mutates it after construction.
class FrozenModel {
public:
    FrozenModel(std::vector<Layer> layers, std::size_t embedding_index);

    // full pass through all layers
    Vec forward(const Vec& x) const;
    // output of the embedding layer (Z)
    Vec encode(const Vec& x) const;
    // output of the penultimate layer (A), the online regression head's input
    Vec forward_truncated(const Vec& x) const;

    std::size_t layer_count() const { return layers_.size(); }
    const Layer& layer(std::size_t i) const { return layers_[i]; }
    std::size_t embedding_index() const { return embedding_index_; }
    std::size_t input_dim() const { return layers_.front().W.cols; }
    std::size_t output_dim() const { return layers_.back().W.rows; }

    bool operator==(const FrozenModel& other) const {
        if (embedding_index_ != other.embedding_index_ || layers_.size() != other.layers_.size())
            return false;
        for (std::size_t i = 0; i < layers_.size(); ++i)
            if (layers_[i].W != other.layers_[i].W || layers_[i].b != other.layers_[i].b ||
                layers_[i].act != other.layers_[i].act)
                return false;
        return true;
    }

private:
    Vec run_prefix(const Vec& x, std::size_t n_layers) const;

    std::vector<Layer> layers_;
    std::size_t embedding_index_;
};

// Mean squared error between two equal-length vectors (the anomaly score).
float reconstruction_error(const Vec& x, const Vec& x_hat);

// PCA projection to 1-D plus min-max scaling into [0,1].
struct Preproc {
    Vec pca_mean;  // 3 entries
    Vec pca_axis;  // 3 entries, unit norm
    float minmax_lo = 0.0f;
    float minmax_hi = 1.0f;

    // per timestep: project onto pca_axis, then clamp-scale into [0,1]
    Vec apply(const StreamWindow& w) const;

    bool operator==(const Preproc&) const = default;
};

}  // namespace tinyol
