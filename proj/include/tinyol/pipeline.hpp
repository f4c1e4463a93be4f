#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tinyol/frozen_model.hpp"
#include "tinyol/metrics.hpp"
#include "tinyol/online_head.hpp"
#include "tinyol/streaming_stats.hpp"
#include "tinyol/window.hpp"

namespace tinyol {

enum class PipelineMode { FineTune, Classify };

struct StepReport {
    std::uint64_t step = 0;
    PipelineMode mode = PipelineMode::FineTune;
    std::optional<float> mse;
    std::optional<float> loss;
    std::optional<int> predicted_class;
    std::optional<int> true_class;
    std::size_t k = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

struct TimingSummary {
    double average_us = 0.0;
    double median_us = 0.0;
    double minimum_us = 0.0;
    double maximum_us = 0.0;
};

// One-sample-at-a-time predict/update loop wiring the frozen model, the
// running stats, the online head, and the metrics. Processing N samples
// leaves the state size constant: no history is retained.
class Pipeline {
public:
    // fine-tune: self-supervised, the target is the preprocessed input
    Pipeline(FrozenModel model, Preproc preproc, RegressionHead head, bool learning_enabled);
    // classify: features are (embedding, reconstruction error), standardized
    // by running stats
    Pipeline(FrozenModel model, Preproc preproc, SoftmaxHead head, bool learning_enabled);

    // The label channel is w.mode (-1 = unlabeled). Prediction for a sample
    // never reflects that sample's own update.
    StepReport process_sample(const StreamWindow& w);

    void set_learning(bool enabled) { learning_enabled_ = enabled; }
    // adjust the head's learning rate mid-stream (decay schedules)
    void set_head_alpha(float alpha);
    bool learning_enabled() const { return learning_enabled_; }
    PipelineMode mode() const { return mode_; }
    std::uint64_t steps() const { return step_; }

    const RegressionHead& regression_head() const;
    const SoftmaxHead& softmax_head() const;
    const RunningStats& stats() const { return stats_; }
    const ConfusionMatrix& confusion() const { return confusion_; }

    // serialized size of the mutable streaming state (head + running stats);
    // used by the O(1)-memory check
    std::size_t state_bytes() const;

private:
    FrozenModel model_;
    Preproc preproc_;
    PipelineMode mode_;
    std::variant<RegressionHead, SoftmaxHead> head_;
    RunningStats stats_;
    ConfusionMatrix confusion_;
    bool learning_enabled_;
    std::uint64_t step_ = 0;
};

enum class BenchMode { Inference, Online };

// Per-iteration wall-clock times over the given windows (>= 100),
// summarized as average/median/min/max.
TimingSummary bench_iteration(Pipeline& p, const std::vector<StreamWindow>& windows,
                              BenchMode mode);

}  // namespace tinyol
