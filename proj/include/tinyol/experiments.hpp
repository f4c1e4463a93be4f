#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tinyol/fan_sim.hpp"
#include "tinyol/frozen_model.hpp"
#include "tinyol/metrics.hpp"
#include "tinyol/online_head.hpp"
#include "tinyol/pipeline.hpp"
#include "tinyol/trainer.hpp"

namespace tinyol {

// End-to-end experiment configuration: synthetic corpora, offline training,
// drift + fine-tune, online classification, and the offline baseline sweep.
struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::size_t train_windows = 3000;
    std::size_t test_windows = 3000;  // per mode
    std::size_t finetune_iterations = 2000;
    std::size_t eval_every = 50;
    std::size_t class_block = 600;  // labeled windows per class per pass
    std::size_t class_passes = 2;

    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    float train_alpha = 0.5f;

    // fine-tune learning rate decays exponentially from finetune_alpha to
    // finetune_alpha_end across the 2000 iterations; a fixed rate either
    // crawls or never settles
    float finetune_alpha = 0.1f;
    float finetune_alpha_end = 0.001f;
    float classify_alpha = 1.0f;
    GradRule grad_rule = GradRule::MseSigmoid;
    DriftConfig drift = DriftConfig::defaults();
    std::vector<std::size_t> baseline_epochs = {1, 5, 10, 50, 100, 200};
    std::string out_dir = "out";
};

std::vector<StreamWindow> make_corpus(int mode, std::size_t n, std::uint64_t seed);

// The four corpora every experiment shares, generated from per-purpose
// sub-seeds of cfg.seed.
struct Corpora {
    std::vector<StreamWindow> train_normal;
    std::vector<StreamWindow> test_normal;
    std::vector<StreamWindow> test_stuck;
    std::vector<StreamWindow> test_tilted;
};

Corpora make_standard_corpora(const ExperimentConfig& cfg);

struct TrainOutput {
    FrozenModel model;
    Preproc preproc;
    std::vector<double> loss_curve;
    double normal_mean_mse = 0.0;    // frozen model on test-normal
    double abnormal_mean_mse = 0.0;  // frozen model on test-stuck + test-tilted
};

TrainOutput run_train(const ExperimentConfig& cfg, const std::vector<StreamWindow>& train_normal,
                      const std::vector<StreamWindow>& test_normal,
                      const std::vector<StreamWindow>& test_stuck,
                      const std::vector<StreamWindow>& test_tilted);

struct FinetuneOutput {
    double train_normal_mean = 0.0;  // frozen model on undrifted training-phase data
    double pre_mean = 0.0;           // frozen model on drifted windows
    double post_mean = 0.0;          // fine-tuned head on fresh drifted windows
    MseAccumulator pre_hist;
    MseAccumulator post_hist;
    TimingSummary inference;
    TimingSummary online;
};

FinetuneOutput run_finetune(const ExperimentConfig& cfg, const FrozenModel& model,
                            const Preproc& preproc,
                            const std::vector<StreamWindow>& train_normal);

struct F1Point {
    std::size_t step = 0;
    std::vector<double> f1;  // per class; negative = class not yet seen
    double macro = 0.0;
};

struct ClassifyOutput {
    std::vector<F1Point> curve;
    double final_macro = 0.0;
};

ClassifyOutput run_classify(const ExperimentConfig& cfg, const FrozenModel& model,
                            const Preproc& preproc, const std::vector<StreamWindow>& test_normal,
                            const std::vector<StreamWindow>& test_stuck,
                            const std::vector<StreamWindow>& test_tilted);

struct BaselinePoint {
    std::size_t epochs = 0;
    double macro = 0.0;
};

std::vector<BaselinePoint> run_baseline(const ExperimentConfig& cfg, const FrozenModel& model,
                                        const Preproc& preproc,
                                        const std::vector<StreamWindow>& test_normal,
                                        const std::vector<StreamWindow>& test_stuck,
                                        const std::vector<StreamWindow>& test_tilted);

// embedding + reconstruction error for one preprocessed window
Vec extract_features(const FrozenModel& model, const Preproc& preproc, const StreamWindow& w);

}  // namespace tinyol
