// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tinyol/experiments.hpp"
#include "tinyol/gradcheck.hpp"
#include "tinyol/model_io.hpp"
#include "tinyol/pipeline.hpp"
#include "tinyol/streaming_stats.hpp"
#include "tinyol/trainer.hpp"

using namespace tinyol;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s - criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion_1_welford() {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    Rng rng(1);
    for (int trial = 0; trial < 3; ++trial) {
        std::size_t n = trial == 0 ? 1000000 : 100000 + rng.index(400000);
        std::vector<float> xs(n);
        for (float& x : xs)
            x = static_cast<float>(trial == 1 ? rng.normal(100.0, 250.0)
                                              : (rng.uniform() * 2.0 - 1.0) * 1000.0);
        RunningStats s(1);
        for (float x : xs) s.update({x});
        // two-pass oracle in extended precision
        long double sum = 0.0L;
        for (float x : xs) sum += x;
        long double mean = sum / static_cast<long double>(n);
        long double acc = 0.0L;
        for (float x : xs) {
            long double d = static_cast<long double>(x) - mean;
            acc += d * d;
        }
        double var = static_cast<double>(acc / static_cast<long double>(n));
        worst = std::max(worst, std::abs(s.mean(0) - static_cast<double>(mean)));
        worst = std::max(worst, std::abs(s.variance(0) - var));
    }
    double secs = elapsed_s(t0);
    report(1, "Welford vs two-pass oracle", worst < 1e-9 && secs < 5.0,
           "max abs diff " + std::to_string(worst) + ", " + std::to_string(secs) + " s");
}

void criterion_2_gradients() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(2);
    double bce = grad_check_regression(GradRule::Bce, rng, 100);
    double mse = grad_check_regression(GradRule::MseSigmoid, rng, 100);
    double soft = grad_check_softmax(rng, 100);
    double back = backprop_grad_check(2, 100);
    double worst = std::max({bce, mse, soft, back});
    double secs = elapsed_s(t0);
    report(2, "gradient correctness vs finite differences", worst < 1e-3 && secs < 10.0,
           "bce " + std::to_string(bce) + ", mse-sigmoid " + std::to_string(mse) + ", softmax " +
               std::to_string(soft) + ", backprop " + std::to_string(back) + ", " +
               std::to_string(secs) + " s");
}

void criterion_9_class_growth() {
    Rng rng(9);
    SoftmaxHead h(5, 0.05f);
    for (int i = 0; i < 20; ++i) {
        Vec f(5);
        for (float& v : f) v = static_cast<float>(rng.normal(0, 1));
        h.update(f, 0);
    }
    std::size_t grows = 0;
    for (std::size_t label : {0u, 1u, 2u}) {
        if (label == h.class_count()) {
            h.add_class();
            ++grows;
        }
        Vec f(5);
        for (float& v : f) v = static_cast<float>(rng.normal(0, 1));
        h.update(f, label);
    }
    bool preserved = true;
    // row 0 checked at the moment of the first growth
    SoftmaxHead g(5, 0.05f);
    Mat row0 = g.weights();
    g.add_class();
    for (std::size_t j = 0; j < 5; ++j)
        if (g.weights().at(0, j) != row0.at(0, j)) preserved = false;

    Vec p = h.predict({0.5f, -1.0f, 0.2f, 0.0f, 1.5f});
    float sum = 0.0f;
    for (float v : p) sum += v;
    bool ok = preserved && grows == 2 && h.class_count() == 3 && std::abs(sum - 1.0f) < 1e-5f;
    report(9, "dynamic class growth", ok,
           "grew " + std::to_string(grows) + " times, k=" + std::to_string(h.class_count()) +
               ", prob sum " + std::to_string(sum));
}

void criterion_10_round_trips(const FrozenModel& model, const Preproc& preproc) {
    bool ok = true;
    std::string detail = "TOLM/TOLP/TOLH bit-exact";

    auto mb = save_model(model);
    if (save_model(load_model(mb)) != mb) ok = false;
    auto pb = save_preproc(preproc);
    if (save_preproc(load_preproc(pb)) != pb) ok = false;

    RegressionHead rh = RegressionHead::from_final_layer(model, 0.01f, GradRule::Bce);
    auto hb = save_head(rh);
    if (save_head(load_regression_head(hb)) != hb) ok = false;
    SoftmaxHead sh(5, 0.02f);
    sh.add_class();
    auto sb = save_head(sh);
    if (save_head(load_softmax_head(sb)) != sb) ok = false;

    int rejected = 0;
    for (auto* bytes : {&mb, &pb, &hb, &sb}) {
        auto bad = *bytes;
        bad[1] = 'X';
        try {
            if (bytes == &mb)
                load_model(bad);
            else if (bytes == &pb)
                load_preproc(bad);
            else if (bytes == &hb)
                load_regression_head(bad);
            else
                load_softmax_head(bad);
        } catch (const FormatError&) {
            ++rejected;
        }
    }
    if (rejected != 4) {
        ok = false;
        detail = "corrupted header accepted";
    }
    report(10, "format round-trips and corruption rejection", ok, detail);
}

void criterion_8_o1_memory(const FrozenModel& model, const Preproc& preproc) {
    Pipeline p(model, preproc, SoftmaxHead(kFeatureDim, 0.05f), true);
    Rng rng(8);
    std::size_t size_10 = 0;
    const std::size_t total = 100000;
    for (std::size_t i = 0; i < total; ++i) {
        p.process_sample(generate_window(static_cast<int>(i % 3), rng, i));
        if (i == 9) size_10 = p.state_bytes();
    }
    std::size_t size_end = p.state_bytes();
    report(8, "O(1)-memory streaming", size_end == size_10,
           "state " + std::to_string(size_10) + " bytes after 10 samples, " +
               std::to_string(size_end) + " after 1e5");
}

}  // namespace

int main() {
    criterion_1_welford();
    criterion_2_gradients();
    criterion_9_class_growth();

    ExperimentConfig cfg;
    std::printf("# generating corpora (seed %llu)...\n",
                static_cast<unsigned long long>(cfg.seed));
    Corpora corpora = make_standard_corpora(cfg);
    const auto& train_normal = corpora.train_normal;
    const auto& test_normal = corpora.test_normal;
    const auto& test_stuck = corpora.test_stuck;
    const auto& test_tilted = corpora.test_tilted;

    std::printf("# training autoencoder (%zu epochs)...\n", cfg.epochs);
    auto t0 = std::chrono::steady_clock::now();
    TrainOutput trained = run_train(cfg, train_normal, test_normal, test_stuck, test_tilted);
    {
        double ratio = trained.abnormal_mean_mse / trained.normal_mean_mse;
        double secs = elapsed_s(t0);
        report(3, "anomaly separation", ratio >= 2.0 && secs < 120.0,
               "abnormal/normal mean MSE ratio " + std::to_string(ratio) + ", " +
                   std::to_string(secs) + " s");
    }

    criterion_10_round_trips(trained.model, trained.preproc);

    {
        auto t = std::chrono::steady_clock::now();
        FinetuneOutput ft = run_finetune(cfg, trained.model, trained.preproc, train_normal);
        double secs = elapsed_s(t);
        double pre_ratio = ft.pre_mean / ft.train_normal_mean;
        double post_ratio = ft.post_mean / ft.train_normal_mean;
        report(4, "drift + fine-tune", pre_ratio >= 1.5 && post_ratio <= 1.2 && secs < 120.0,
               "pre/train ratio " + std::to_string(pre_ratio) + ", post/train ratio " +
                   std::to_string(post_ratio) + ", " + std::to_string(secs) + " s");

        bool timing_ok = ft.online.average_us >= ft.inference.average_us &&
                         ft.inference.minimum_us <= ft.inference.median_us &&
                         ft.inference.median_us <= ft.inference.maximum_us &&
                         ft.online.minimum_us <= ft.online.median_us &&
                         ft.online.median_us <= ft.online.maximum_us;
        report(7, "timing ordering (avg/median/min/max per mode)", timing_ok,
               "inference avg " + std::to_string(ft.inference.average_us) + " us, online avg " +
                   std::to_string(ft.online.average_us) + " us");
    }

    double online_final_macro = 0.0;
    {
        auto t = std::chrono::steady_clock::now();
        ClassifyOutput cl =
            run_classify(cfg, trained.model, trained.preproc, test_normal, test_stuck, test_tilted);
        double secs = elapsed_s(t);
        online_final_macro = cl.final_macro;
        double macro_at_50 = cl.curve.front().macro;
        report(5, "online classification macro-F1",
               cl.final_macro >= 0.8 && cl.final_macro >= macro_at_50 && secs < 120.0,
               "final " + std::to_string(cl.final_macro) + ", at step 50 " +
                   std::to_string(macro_at_50) + ", " + std::to_string(secs) + " s");
    }

    {
        auto t = std::chrono::steady_clock::now();
        auto baseline =
            run_baseline(cfg, trained.model, trained.preproc, test_normal, test_stuck, test_tilted);
        double secs = elapsed_s(t);
        double best_offline = 0.0;
        for (const BaselinePoint& p : baseline)
            if (p.epochs >= 50) best_offline = std::max(best_offline, p.macro);
        report(6, "offline >= online ordering", best_offline >= online_final_macro && secs < 180.0,
               "offline (>=50 epochs) " + std::to_string(best_offline) + " vs online " +
                   std::to_string(online_final_macro) + ", " + std::to_string(secs) + " s");
    }

    criterion_8_o1_memory(trained.model, trained.preproc);

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
