#pragma once

#include <cstdint>
#include <vector>

#include "tinyol/frozen_model.hpp"
#include "tinyol/online_head.hpp"

namespace tinyol {

// Reference autoencoder architecture: 40-16-4-16-40, relu hiddens,
// sigmoid output, embedding at layer 1.
inline constexpr std::size_t kAutoencoderDims[] = {40, 16, 4, 16, 40};
inline constexpr std::size_t kEmbeddingLayerIndex = 1;
inline constexpr std::size_t kEmbeddingDim = 4;
inline constexpr std::size_t kFeatureDim = kEmbeddingDim + 1;  // embedding + MSE

enum class TrainLoss { Mse, Bce };

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    float alpha = 0.5f;
    std::uint64_t seed = 1;
    TrainLoss loss = TrainLoss::Mse;
};

struct Dataset {
    std::vector<Vec> inputs;
    std::vector<int> labels;  // empty when unlabeled
};

// Desk-side minibatch SGD on reconstruction loss. Deterministic per seed.
// Throws ConvergenceError (carrying the loss curve) if the mean epoch loss
// did not decrease over the run.
FrozenModel train_autoencoder(const Dataset& data, const TrainConfig& cfg,
                              std::vector<double>* loss_curve = nullptr);

// Offline softmax-regression baseline on pre-extracted features.
SoftmaxHead train_softmax_offline(const Dataset& features, const TrainConfig& cfg);

// Analytic backprop vs central finite differences on a tiny 4-3-2-3-4 net;
// returns the max relative error.
double backprop_grad_check(std::uint64_t seed, int instances = 20);

}  // namespace tinyol
