// tinyol command-line front end: corpus generation, offline training, the
// drift/fine-tune and online-classification experiments, benchmarking, and
// gradient checks. All artifacts are CSV plus one run-manifest JSON.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tinyol/experiments.hpp"
#include "tinyol/gradcheck.hpp"
#include "tinyol/model_io.hpp"

using namespace tinyol;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitCheckFailed = 3;

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t hash_file(const std::string& path) { return fnv1a(read_file(path)); }

struct Artifacts {
    std::string command;
    std::vector<std::string> paths;

    void add(const std::string& p) { paths.push_back(p); }
};

json drift_json(const DriftConfig& d) {
    return json{{"rx_deg", d.rx_deg}, {"ry_deg", d.ry_deg},   {"rz_deg", d.rz_deg},
                {"gain", d.gain},     {"offset_x", d.offset[0]}, {"offset_y", d.offset[1]},
                {"offset_z", d.offset[2]}};
}

const char* grad_rule_name(GradRule r) {
    switch (r) {
        case GradRule::Bce: return "bce";
        case GradRule::MseSigmoid: return "mse-sigmoid";
        default: return "paper-literal";
    }
}

void write_manifest(const ExperimentConfig& cfg, const Artifacts& a) {
    json m;
    m["command"] = a.command;
    m["config"] = {
        {"seed", cfg.seed},
        {"train_windows", cfg.train_windows},
        {"test_windows", cfg.test_windows},
        {"finetune_iterations", cfg.finetune_iterations},
        {"eval_every", cfg.eval_every},
        {"class_block", cfg.class_block},
        {"class_passes", cfg.class_passes},
        {"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"train_alpha", cfg.train_alpha},
        {"finetune_alpha", cfg.finetune_alpha},
        {"classify_alpha", cfg.classify_alpha},
        {"grad_rule", grad_rule_name(cfg.grad_rule)},
        {"drift", drift_json(cfg.drift)},
        {"out_dir", cfg.out_dir},
    };
    json hashes = json::object();
    for (const std::string& p : a.paths) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(hash_file(p)));
        hashes[fs::path(p).filename().string()] = buf;
    }
    m["artifacts"] = hashes;

    std::ofstream f(cfg.out_dir + "/run_manifest.json", std::ios::trunc);
    if (!f) throw IoError("cannot write manifest in " + cfg.out_dir);
    f << m.dump(2) << '\n';
}

std::ofstream open_csv(const std::string& path, Artifacts& a) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f.precision(9);
    a.add(path);
    return f;
}

std::string corpus_path(const ExperimentConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name + ".csv";
}

// Load TOLM/TOLP written by the train command; missing files are a usage
// error, malformed ones a format error (handled by the caller).
FrozenModel load_model_file(const ExperimentConfig& cfg) {
    return load_model(read_file(cfg.out_dir + "/model.tolm"));
}
Preproc load_preproc_file(const ExperimentConfig& cfg) {
    return load_preproc(read_file(cfg.out_dir + "/preproc.tolp"));
}

bool model_files_exist(const ExperimentConfig& cfg) {
    return fs::exists(cfg.out_dir + "/model.tolm") && fs::exists(cfg.out_dir + "/preproc.tolp");
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const ExperimentConfig& cfg) {
    Artifacts a{"gen-data", {}};
    Corpora c = make_standard_corpora(cfg);
    const std::pair<const char*, const std::vector<StreamWindow>*> sets[] = {
        {"train_normal", &c.train_normal},
        {"test_normal", &c.test_normal},
        {"test_stuck", &c.test_stuck},
        {"test_tilted", &c.test_tilted},
    };
    for (auto& [name, windows] : sets) {
        std::string path = corpus_path(cfg, name);
        write_corpus_csv(path, *windows);
        a.add(path);
        std::printf("wrote %s (%zu windows)\n", path.c_str(), windows->size());
    }
    write_manifest(cfg, a);
    return kExitOk;
}

Corpora read_corpora(const ExperimentConfig& cfg) {
    Corpora c;
    const std::pair<const char*, std::vector<StreamWindow>*> sets[] = {
        {"train_normal", &c.train_normal},
        {"test_normal", &c.test_normal},
        {"test_stuck", &c.test_stuck},
        {"test_tilted", &c.test_tilted},
    };
    for (auto& [name, windows] : sets) *windows = read_corpus_csv(corpus_path(cfg, name));
    return c;
}

int cmd_train(const ExperimentConfig& cfg) {
    for (const char* name : {"train_normal", "test_normal", "test_stuck", "test_tilted"})
        if (!fs::exists(corpus_path(cfg, name))) {
            std::fprintf(stderr, "missing corpus %s; run gen-data first\n",
                         corpus_path(cfg, name).c_str());
            return kExitUsage;
        }

    Artifacts a{"train", {}};
    Corpora c = read_corpora(cfg);
    TrainOutput out = run_train(cfg, c.train_normal, c.test_normal, c.test_stuck, c.test_tilted);

    write_file(cfg.out_dir + "/model.tolm", save_model(out.model));
    a.add(cfg.out_dir + "/model.tolm");
    write_file(cfg.out_dir + "/preproc.tolp", save_preproc(out.preproc));
    a.add(cfg.out_dir + "/preproc.tolp");

    {
        std::ofstream f = open_csv(cfg.out_dir + "/loss_curve.csv", a);
        f << "epoch,mean_loss\n";
        for (std::size_t e = 0; e < out.loss_curve.size(); ++e)
            f << e + 1 << ',' << out.loss_curve[e] << '\n';
    }
    write_manifest(cfg, a);
    std::printf("normal mean MSE %.6g, abnormal mean MSE %.6g, ratio %.3f\n", out.normal_mean_mse,
                out.abnormal_mean_mse, out.abnormal_mean_mse / out.normal_mean_mse);
    return kExitOk;
}

void write_histogram_csv(const std::string& path, const MseAccumulator& h, Artifacts& a) {
    std::ofstream f = open_csv(path, a);
    f << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.bin_count(); ++b) {
        f << h.bin_lo(b) << ',';
        if (b + 1 == h.bin_count())
            f << "inf";
        else
            f << h.bin_hi(b);
        f << ',' << h.bin(b) << '\n';
    }
}

void write_timing_csv(const std::string& path, const TimingSummary& inference,
                      const TimingSummary& online, Artifacts& a) {
    std::ofstream f = open_csv(path, a);
    f << "mode,average_us,median_us,minimum_us,maximum_us\n";
    f << "inference," << inference.average_us << ',' << inference.median_us << ','
      << inference.minimum_us << ',' << inference.maximum_us << '\n';
    f << "online," << online.average_us << ',' << online.median_us << ',' << online.minimum_us
      << ',' << online.maximum_us << '\n';
}

int cmd_finetune(const ExperimentConfig& cfg) {
    if (!model_files_exist(cfg)) {
        std::fprintf(stderr, "missing model files in %s; run train first\n", cfg.out_dir.c_str());
        return kExitUsage;
    }
    Artifacts a{"finetune", {}};
    FrozenModel model = load_model_file(cfg);
    Preproc preproc = load_preproc_file(cfg);

    std::vector<StreamWindow> train_normal;
    if (fs::exists(corpus_path(cfg, "train_normal")))
        train_normal = read_corpus_csv(corpus_path(cfg, "train_normal"));
    else
        train_normal = make_standard_corpora(cfg).train_normal;

    FinetuneOutput out = run_finetune(cfg, model, preproc, train_normal);
    write_histogram_csv(cfg.out_dir + "/mse_hist_pre.csv", out.pre_hist, a);
    write_histogram_csv(cfg.out_dir + "/mse_hist_post.csv", out.post_hist, a);
    write_timing_csv(cfg.out_dir + "/timing.csv", out.inference, out.online, a);
    write_manifest(cfg, a);

    std::printf("train-normal mean MSE %.6g\n", out.train_normal_mean);
    std::printf("drifted, frozen:      %.6g (%.2fx)\n", out.pre_mean,
                out.pre_mean / out.train_normal_mean);
    std::printf("drifted, fine-tuned:  %.6g (%.2fx)\n", out.post_mean,
                out.post_mean / out.train_normal_mean);
    std::printf("timing: inference avg %.1f us, online avg %.1f us\n", out.inference.average_us,
                out.online.average_us);
    return kExitOk;
}

int cmd_classify(const ExperimentConfig& cfg) {
    if (!model_files_exist(cfg)) {
        std::fprintf(stderr, "missing model files in %s; run train first\n", cfg.out_dir.c_str());
        return kExitUsage;
    }
    Artifacts a{"classify", {}};
    FrozenModel model = load_model_file(cfg);
    Preproc preproc = load_preproc_file(cfg);
    Corpora c = read_corpora(cfg);

    ClassifyOutput out = run_classify(cfg, model, preproc, c.test_normal, c.test_stuck,
                                      c.test_tilted);
    {
        std::ofstream f = open_csv(cfg.out_dir + "/f1_curve.csv", a);
        f << "step,f1_class0,f1_class1,f1_class2,macro_f1\n";
        for (const F1Point& p : out.curve) {
            f << p.step;
            for (double v : p.f1) {
                f << ',';
                if (v >= 0.0) f << v;  // empty field for not-yet-seen classes
            }
            f << ',' << p.macro << '\n';
        }
    }
    write_manifest(cfg, a);
    std::printf("final macro-F1 %.4f over %zu evaluation points\n", out.final_macro,
                out.curve.size());
    return kExitOk;
}

int cmd_baseline(const ExperimentConfig& cfg) {
    if (!model_files_exist(cfg)) {
        std::fprintf(stderr, "missing model files in %s; run train first\n", cfg.out_dir.c_str());
        return kExitUsage;
    }
    Artifacts a{"baseline", {}};
    FrozenModel model = load_model_file(cfg);
    Preproc preproc = load_preproc_file(cfg);
    Corpora c = read_corpora(cfg);

    auto points = run_baseline(cfg, model, preproc, c.test_normal, c.test_stuck, c.test_tilted);
    {
        std::ofstream f = open_csv(cfg.out_dir + "/baseline.csv", a);
        f << "epochs,macro_f1\n";
        for (const BaselinePoint& p : points) f << p.epochs << ',' << p.macro << '\n';
    }
    write_manifest(cfg, a);
    for (const BaselinePoint& p : points)
        std::printf("epochs %4zu: macro-F1 %.4f\n", p.epochs, p.macro);
    return kExitOk;
}

int cmd_bench(const ExperimentConfig& cfg) {
    if (!model_files_exist(cfg)) {
        std::fprintf(stderr, "missing model files in %s; run train first\n", cfg.out_dir.c_str());
        return kExitUsage;
    }
    Artifacts a{"bench", {}};
    FrozenModel model = load_model_file(cfg);
    Preproc preproc = load_preproc_file(cfg);

    std::vector<StreamWindow> windows;
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < cfg.finetune_iterations; ++i)
        windows.push_back(generate_window(kModeNormal, rng, i, cfg.drift));

    Pipeline p(model, preproc,
               RegressionHead::from_final_layer(model, cfg.finetune_alpha, cfg.grad_rule), false);
    TimingSummary inference = bench_iteration(p, windows, BenchMode::Inference);
    TimingSummary online = bench_iteration(p, windows, BenchMode::Online);
    write_timing_csv(cfg.out_dir + "/timing.csv", inference, online, a);
    write_manifest(cfg, a);
    std::printf("inference: avg %.1f median %.1f min %.1f max %.1f us\n", inference.average_us,
                inference.median_us, inference.minimum_us, inference.maximum_us);
    std::printf("online:    avg %.1f median %.1f min %.1f max %.1f us\n", online.average_us,
                online.median_us, online.minimum_us, online.maximum_us);
    return kExitOk;
}

int cmd_gradcheck(const ExperimentConfig& cfg) {
    Rng rng(cfg.seed);
    struct Row {
        const char* name;
        double max_rel_err;
    };
    std::vector<Row> rows = {
        {"regression-bce", grad_check_regression(GradRule::Bce, rng, 100)},
        {"regression-mse-sigmoid", grad_check_regression(GradRule::MseSigmoid, rng, 100)},
        {"softmax", grad_check_softmax(rng, 100)},
        {"backprop", backprop_grad_check(cfg.seed, 100)},
    };
    bool ok = true;
    for (const Row& r : rows) {
        bool pass = r.max_rel_err < 1e-3;
        ok = ok && pass;
        std::printf("%-24s max rel err %.3e  %s\n", r.name, r.max_rel_err,
                    pass ? "ok" : "FAILED");
    }
    return ok ? kExitOk : kExitCheckFailed;
}

bool parse_drift(const std::string& s, DriftConfig& out) {
    std::istringstream ss(s);
    float v[7];
    char comma;
    for (int i = 0; i < 7; ++i) {
        if (i > 0 && (!(ss >> comma) || comma != ',')) return false;
        if (!(ss >> v[i])) return false;
    }
    std::string rest;
    if (ss >> rest) return false;
    out = DriftConfig{v[0], v[1], v[2], v[3], {v[4], v[5], v[6]}};
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tinyol: streaming online learning on a frozen model"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    ExperimentConfig cfg;
    std::string grad_rule = "bce";
    std::string drift_str;
    float alpha = -1.0f;

    app.add_option("--seed", cfg.seed, "master random seed");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--alpha", alpha, "learning rate for the active command");
    app.add_option("--grad-rule", grad_rule, "regression update rule")
        ->check(CLI::IsMember({"bce", "mse-sigmoid", "paper-literal"}));
    app.add_option("--iterations", cfg.finetune_iterations, "fine-tune / bench iterations");
    app.add_option("--eval-every", cfg.eval_every, "classification evaluation interval");
    app.add_option("--drift", drift_str, "drift as rx,ry,rz,gain,ox,oy,oz");
    app.add_option("--epochs", cfg.epochs, "offline training epochs");
    app.add_option("--train-windows", cfg.train_windows, "training corpus size");
    app.add_option("--test-windows", cfg.test_windows, "test corpus size per mode");

    auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpora");
    auto* train = app.add_subcommand("train", "fit preprocessing and train the autoencoder");
    auto* finetune = app.add_subcommand("finetune", "drift + online fine-tune experiment");
    auto* classify = app.add_subcommand("classify", "online multi-class experiment");
    auto* baseline = app.add_subcommand("baseline", "offline softmax baseline sweep");
    auto* bench = app.add_subcommand("bench", "per-iteration timing");
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (grad_rule == "mse-sigmoid")
        cfg.grad_rule = GradRule::MseSigmoid;
    else if (grad_rule == "paper-literal")
        cfg.grad_rule = GradRule::PaperLiteral;

    if (!drift_str.empty() && !parse_drift(drift_str, cfg.drift)) {
        std::fprintf(stderr, "bad --drift value '%s' (want rx,ry,rz,gain,ox,oy,oz)\n",
                     drift_str.c_str());
        return kExitUsage;
    }
    if (alpha > 0.0f) {
        cfg.train_alpha = alpha;
        cfg.finetune_alpha = alpha;
        cfg.finetune_alpha_end = alpha / 100.0f;
        cfg.classify_alpha = alpha;
    }

    try {
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec) {
            std::fprintf(stderr, "cannot create output directory %s\n", cfg.out_dir.c_str());
            return kExitUsage;
        }
        if (gen->parsed()) return cmd_gen_data(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (finetune->parsed()) return cmd_finetune(cfg);
        if (classify->parsed()) return cmd_classify(cfg);
        if (baseline->parsed()) return cmd_baseline(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
        if (gradcheck->parsed()) return cmd_gradcheck(cfg);
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitFormat;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitFormat;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "training did not converge: %s\n", e.what());
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFormat;
    }
    return kExitUsage;
}
