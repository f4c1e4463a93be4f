#include "tinyol/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "tinyol/streaming_stats.hpp"

namespace tinyol {

namespace {

// stable sub-seeds for the independent streams of one experiment
enum : std::uint64_t {
    kSeedTrainNormal = 0x101,
    kSeedTestNormal = 0x202,
    kSeedTestStuck = 0x303,
    kSeedTestTilted = 0x404,
    kSeedFinetunePre = 0x505,
    kSeedFinetuneStream = 0x606,
    kSeedFinetunePost = 0x707,
    kSeedFinetuneBench = 0x808,
    kSeedClassifyStream = 0x909,
};

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
    return seed * 0x9e3779b97f4a7c15ull + stream;
}

double mean_frozen_mse(const FrozenModel& model, const Preproc& preproc,
                       const std::vector<StreamWindow>& windows) {
    double acc = 0.0;
    for (const StreamWindow& w : windows) {
        Vec x = preproc.apply(w);
        acc += reconstruction_error(x, model.forward(x));
    }
    return acc / static_cast<double>(windows.size());
}

}  // namespace

std::vector<StreamWindow> make_corpus(int mode, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<StreamWindow> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(generate_window(mode, rng, i));
    return out;
}

Corpora make_standard_corpora(const ExperimentConfig& cfg) {
    return Corpora{
        make_corpus(kModeNormal, cfg.train_windows, sub_seed(cfg.seed, kSeedTrainNormal)),
        make_corpus(kModeNormal, cfg.test_windows, sub_seed(cfg.seed, kSeedTestNormal)),
        make_corpus(kModeStuck, cfg.test_windows, sub_seed(cfg.seed, kSeedTestStuck)),
        make_corpus(kModeTilted, cfg.test_windows, sub_seed(cfg.seed, kSeedTestTilted)),
    };
}

Vec extract_features(const FrozenModel& model, const Preproc& preproc, const StreamWindow& w) {
    Vec x = preproc.apply(w);
    Vec f = model.encode(x);
    f.push_back(reconstruction_error(x, model.forward(x)));
    return f;
}

TrainOutput run_train(const ExperimentConfig& cfg, const std::vector<StreamWindow>& train_normal,
                      const std::vector<StreamWindow>& test_normal,
                      const std::vector<StreamWindow>& test_stuck,
                      const std::vector<StreamWindow>& test_tilted) {
    Preproc preproc = fit_preproc(train_normal);

    Dataset data;
    data.inputs.reserve(train_normal.size());
    for (const StreamWindow& w : train_normal) data.inputs.push_back(preproc.apply(w));

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.alpha = cfg.train_alpha;
    tc.seed = cfg.seed;
    std::vector<double> curve;
    FrozenModel model = train_autoencoder(data, tc, &curve);

    double normal_mean = mean_frozen_mse(model, preproc, test_normal);
    double abn_acc = mean_frozen_mse(model, preproc, test_stuck) *
                         static_cast<double>(test_stuck.size()) +
                     mean_frozen_mse(model, preproc, test_tilted) *
                         static_cast<double>(test_tilted.size());
    double abnormal_mean = abn_acc / static_cast<double>(test_stuck.size() + test_tilted.size());

    return TrainOutput{std::move(model), std::move(preproc), std::move(curve), normal_mean,
                       abnormal_mean};
}

FinetuneOutput run_finetune(const ExperimentConfig& cfg, const FrozenModel& model,
                            const Preproc& preproc,
                            const std::vector<StreamWindow>& train_normal) {
    double train_mean = mean_frozen_mse(model, preproc, train_normal);
    double hist_edge = 5.0 * train_mean;
    MseAccumulator pre_hist(hist_edge), post_hist(hist_edge);

    // before: the frozen model meets the drifted field data
    {
        Rng rng(sub_seed(cfg.seed, kSeedFinetunePre));
        for (std::size_t i = 0; i < cfg.test_windows; ++i) {
            StreamWindow w = generate_window(kModeNormal, rng, i, cfg.drift);
            Vec x = preproc.apply(w);
            pre_hist.record(reconstruction_error(x, model.forward(x)));
        }
    }

    // online post-training of the replaced final layer
    RegressionHead head =
        RegressionHead::from_final_layer(model, cfg.finetune_alpha, cfg.grad_rule);
    Pipeline pipeline(model, preproc, std::move(head), true);
    {
        // exponential learning-rate decay over the stream
        double decay = cfg.finetune_iterations < 2
                           ? 1.0
                           : std::pow(static_cast<double>(cfg.finetune_alpha_end) /
                                          static_cast<double>(cfg.finetune_alpha),
                                      1.0 / static_cast<double>(cfg.finetune_iterations - 1));
        double alpha = cfg.finetune_alpha;
        Rng rng(sub_seed(cfg.seed, kSeedFinetuneStream));
        for (std::size_t i = 0; i < cfg.finetune_iterations; ++i) {
            pipeline.set_head_alpha(static_cast<float>(alpha));
            pipeline.process_sample(generate_window(kModeNormal, rng, i, cfg.drift));
            alpha *= decay;
        }
    }

    // after: fresh drifted windows, learning off
    pipeline.set_learning(false);
    {
        Rng rng(sub_seed(cfg.seed, kSeedFinetunePost));
        for (std::size_t i = 0; i < cfg.test_windows; ++i) {
            StepReport r =
                pipeline.process_sample(generate_window(kModeNormal, rng, i, cfg.drift));
            post_hist.record(static_cast<double>(*r.mse));
        }
    }

    std::vector<StreamWindow> bench_windows;
    {
        Rng rng(sub_seed(cfg.seed, kSeedFinetuneBench));
        for (std::size_t i = 0; i < cfg.test_windows; ++i)
            bench_windows.push_back(generate_window(kModeNormal, rng, i, cfg.drift));
    }
    TimingSummary inference = bench_iteration(pipeline, bench_windows, BenchMode::Inference);
    TimingSummary online = bench_iteration(pipeline, bench_windows, BenchMode::Online);

    return FinetuneOutput{train_mean,          pre_hist.mean(),     post_hist.mean(),
                          std::move(pre_hist), std::move(post_hist), inference, online};
}

namespace {

struct TestFeatures {
    std::vector<Vec> raw;  // 5-dim, not yet standardized
    std::vector<int> labels;
};

TestFeatures collect_test_features(const FrozenModel& model, const Preproc& preproc,
                                   const std::vector<StreamWindow>& test_normal,
                                   const std::vector<StreamWindow>& test_stuck,
                                   const std::vector<StreamWindow>& test_tilted) {
    TestFeatures tf;
    auto add = [&](const std::vector<StreamWindow>& ws, int label) {
        for (const StreamWindow& w : ws) {
            tf.raw.push_back(extract_features(model, preproc, w));
            tf.labels.push_back(label);
        }
    };
    add(test_normal, kModeNormal);
    add(test_stuck, kModeStuck);
    add(test_tilted, kModeTilted);
    return tf;
}

F1Point evaluate_head(const SoftmaxHead& head, const RunningStats& stats, const TestFeatures& tf,
                      std::size_t step) {
    ConfusionMatrix cm(3);
    for (std::size_t i = 0; i < tf.raw.size(); ++i) {
        Vec f = stats.standardize(tf.raw[i]);
        Vec p = head.predict(f);
        auto predicted =
            static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        cm.record(predicted, static_cast<std::size_t>(tf.labels[i]));
    }
    F1Point point;
    point.step = step;
    point.f1 = cm.f1_per_class();
    for (std::size_t c = head.class_count(); c < point.f1.size(); ++c)
        point.f1[c] = -1.0;  // class not yet seen by the online head
    point.macro = cm.macro_f1();
    return point;
}

}  // namespace

ClassifyOutput run_classify(const ExperimentConfig& cfg, const FrozenModel& model,
                            const Preproc& preproc, const std::vector<StreamWindow>& test_normal,
                            const std::vector<StreamWindow>& test_stuck,
                            const std::vector<StreamWindow>& test_tilted) {
    TestFeatures tf = collect_test_features(model, preproc, test_normal, test_stuck, test_tilted);

    Pipeline pipeline(model, preproc, SoftmaxHead(kFeatureDim, cfg.classify_alpha), true);
    Rng rng(sub_seed(cfg.seed, kSeedClassifyStream));

    ClassifyOutput out;
    std::size_t step = 0;
    std::size_t total = cfg.class_passes * 3 * cfg.class_block;
    for (std::size_t pass = 0; pass < cfg.class_passes; ++pass) {
        for (int cls = kModeNormal; cls <= kModeTilted; ++cls) {
            for (std::size_t i = 0; i < cfg.class_block; ++i) {
                StreamWindow w = generate_window(cls, rng, step);
                pipeline.process_sample(w);
                ++step;
                if (step % cfg.eval_every == 0 || step == total)
                    out.curve.push_back(
                        evaluate_head(pipeline.softmax_head(), pipeline.stats(), tf, step));
            }
        }
    }
    out.final_macro = out.curve.back().macro;
    return out;
}

std::vector<BaselinePoint> run_baseline(const ExperimentConfig& cfg, const FrozenModel& model,
                                        const Preproc& preproc,
                                        const std::vector<StreamWindow>& test_normal,
                                        const std::vector<StreamWindow>& test_stuck,
                                        const std::vector<StreamWindow>& test_tilted) {
    // same labeled windows the online run consumed
    Rng rng(sub_seed(cfg.seed, kSeedClassifyStream));
    Dataset train;
    std::size_t step = 0;
    for (std::size_t pass = 0; pass < cfg.class_passes; ++pass) {
        for (int cls = kModeNormal; cls <= kModeTilted; ++cls) {
            for (std::size_t i = 0; i < cfg.class_block; ++i) {
                StreamWindow w = generate_window(cls, rng, step++);
                train.inputs.push_back(extract_features(model, preproc, w));
                train.labels.push_back(cls);
            }
        }
    }

    // whole-dataset standardization statistics
    RunningStats stats(kFeatureDim);
    for (const Vec& f : train.inputs) stats.update(f);
    for (Vec& f : train.inputs) f = stats.standardize(f);

    TestFeatures tf = collect_test_features(model, preproc, test_normal, test_stuck, test_tilted);

    std::vector<BaselinePoint> out;
    for (std::size_t epochs : cfg.baseline_epochs) {
        TrainConfig tc;
        tc.epochs = epochs;
        tc.batch_size = cfg.batch_size;
        tc.alpha = cfg.classify_alpha;
        tc.seed = cfg.seed;
        SoftmaxHead head = train_softmax_offline(train, tc);
        F1Point p = evaluate_head(head, stats, tf, epochs);
        out.push_back(BaselinePoint{epochs, p.macro});
    }
    return out;
}

}  // namespace tinyol
