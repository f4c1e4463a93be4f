#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "tinyol/fan_sim.hpp"

using namespace tinyol;

namespace {

// brute-force DFT magnitude of one axis
std::vector<double> dft_magnitude(const StreamWindow& w, std::size_t axis) {
    std::vector<double> mags(kWindowLen / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < kWindowLen; ++t) {
            double angle = -2.0 * M_PI * static_cast<double>(k * t) / kWindowLen;
            acc += static_cast<double>(w.at(t, axis)) *
                   std::complex<double>(std::cos(angle), std::sin(angle));
        }
        mags[k] = std::abs(acc);
    }
    return mags;
}

// closed-form top eigenpair of a symmetric 3x3 matrix (characteristic
// polynomial; independent of the power-iteration path under test)
std::array<double, 3> top_eigenvector_3x3(const double c[3][3]) {
    double p1 = c[0][1] * c[0][1] + c[0][2] * c[0][2] + c[1][2] * c[1][2];
    double q = (c[0][0] + c[1][1] + c[2][2]) / 3.0;
    double p2 = (c[0][0] - q) * (c[0][0] - q) + (c[1][1] - q) * (c[1][1] - q) +
                (c[2][2] - q) * (c[2][2] - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    double b[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i][j] = (c[i][j] - (i == j ? q : 0.0)) / p;
    double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                  b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                  b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    double r = std::clamp(detb / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double lambda = q + 2.0 * p * std::cos(phi);  // largest eigenvalue

    // eigenvector from the cross product of two rows of (C - lambda I)
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = c[i][j] - (i == j ? lambda : 0.0);
    std::array<double, 3> best{0, 0, 0};
    double best_norm = 0.0;
    int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto& pr : pairs) {
        const double* a = m[pr[0]];
        const double* bb = m[pr[1]];
        std::array<double, 3> v = {a[1] * bb[2] - a[2] * bb[1], a[2] * bb[0] - a[0] * bb[2],
                                   a[0] * bb[1] - a[1] * bb[0]};
        double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (norm > best_norm) {
            best_norm = norm;
            best = v;
        }
    }
    for (double& v : best) v /= best_norm;
    int major = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(best[i]) > std::abs(best[major])) major = i;
    if (best[major] < 0.0)
        for (double& v : best) v = -v;
    return best;
}

std::vector<StreamWindow> corpus(int mode, std::size_t n, std::uint64_t seed,
                                 float noise_scale = 1.0f) {
    Rng rng(seed);
    std::vector<StreamWindow> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(generate_window(mode, rng, i, std::nullopt, noise_scale));
    return out;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
    Rng a(42), b(42);
    for (int mode = 0; mode <= 2; ++mode) {
        StreamWindow w1 = generate_window(mode, a, 0);
        StreamWindow w2 = generate_window(mode, b, 0);
        CHECK(w1.samples == w2.samples);
    }
}

TEST_CASE("invalid mode is rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(generate_window(3, rng), DomainError);
    CHECK_THROWS_AS(generate_window(-1, rng), DomainError);
}

TEST_CASE("noise-free normal spectrum peaks at the bin nearest 20 Hz") {
    // bin k covers k * 119/40 Hz; 20 Hz is nearest bin 7
    Rng rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        StreamWindow w = generate_window(kModeNormal, rng, trial, std::nullopt, 0.0f);
        auto mags = dft_magnitude(w, 0);
        std::size_t peak = 1;
        for (std::size_t k = 2; k < mags.size(); ++k)
            if (mags[k] > mags[peak]) peak = k;
        CHECK(peak == 7);
    }
}

TEST_CASE("stuck spectrum has no tone above the noise floor") {
    Rng rng(20);
    std::vector<double> avg(kWindowLen / 2 + 1, 0.0);
    const int n = 20;
    for (int i = 0; i < n; ++i) {
        auto mags = dft_magnitude(generate_window(kModeStuck, rng, i), 0);
        for (std::size_t k = 0; k < mags.size(); ++k) avg[k] += mags[k] / n;
    }
    std::vector<double> nonzero(avg.begin() + 1, avg.end());
    std::sort(nonzero.begin(), nonzero.end());
    double median = nonzero[nonzero.size() / 2];
    CHECK(nonzero.back() < 3.0 * median);
}

TEST_CASE("identity drift leaves windows bit-exact") {
    Rng rng(30);
    StreamWindow w = generate_window(kModeTilted, rng, 0);
    StreamWindow d = apply_drift(w, DriftConfig::none());
    CHECK(d.samples == w.samples);
}

TEST_CASE("pure rotation preserves sample norms") {
    Rng rng(31);
    DriftConfig d{12.0f, -7.0f, 33.0f, 1.0f, {0.0f, 0.0f, 0.0f}};
    StreamWindow w = generate_window(kModeNormal, rng, 0);
    StreamWindow r = apply_drift(w, d);
    for (std::size_t t = 0; t < kWindowLen; ++t) {
        double n0 = 0.0, n1 = 0.0;
        for (std::size_t a = 0; a < kAxes; ++a) {
            n0 += static_cast<double>(w.at(t, a)) * w.at(t, a);
            n1 += static_cast<double>(r.at(t, a)) * r.at(t, a);
        }
        CHECK(std::abs(std::sqrt(n0) - std::sqrt(n1)) < 1e-5);
    }
}

TEST_CASE("fit_preproc recovers an axis-aligned principal direction") {
    Rng rng(40);
    std::vector<StreamWindow> ws(120);
    for (StreamWindow& w : ws)
        for (std::size_t t = 0; t < kWindowLen; ++t) {
            w.at(t, 0) = static_cast<float>(rng.normal(0.0, 1.0));
            w.at(t, 1) = 0.25f;
            w.at(t, 2) = -0.5f;
        }
    Preproc p = fit_preproc(ws);
    CHECK(std::abs(p.pca_axis[0] - 1.0f) < 1e-6f);
    CHECK(std::abs(p.pca_axis[1]) < 1e-6f);
    CHECK(std::abs(p.pca_axis[2]) < 1e-6f);
}

TEST_CASE("fit_preproc matches the closed-form 3x3 eigen oracle") {
    auto ws = corpus(kModeNormal, 300, 50);
    Preproc p = fit_preproc(ws);

    // oracle covariance
    double mean[3] = {};
    std::size_t n = ws.size() * kWindowLen;
    for (const auto& w : ws)
        for (std::size_t t = 0; t < kWindowLen; ++t)
            for (int a = 0; a < 3; ++a) mean[a] += w.at(t, a);
    for (double& m : mean) m /= static_cast<double>(n);
    double cov[3][3] = {};
    for (const auto& w : ws)
        for (std::size_t t = 0; t < kWindowLen; ++t)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    cov[i][j] += (w.at(t, i) - mean[i]) * (w.at(t, j) - mean[j]) / n;
    auto oracle = top_eigenvector_3x3(cov);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(p.pca_axis[i] - oracle[i]) < 1e-6);

    // axis is unit norm
    double norm = 0.0;
    for (float v : p.pca_axis) norm += static_cast<double>(v) * v;
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-6);
}

TEST_CASE("projection variance along the fitted axis dominates perpendicular axes") {
    auto ws = corpus(kModeNormal, 200, 51);
    Preproc p = fit_preproc(ws);

    auto projection_variance = [&](const std::array<double, 3>& axis) {
        double sum = 0.0, sum2 = 0.0;
        std::size_t n = ws.size() * kWindowLen;
        for (const auto& w : ws)
            for (std::size_t t = 0; t < kWindowLen; ++t) {
                double s = 0.0;
                for (int a = 0; a < 3; ++a) s += axis[a] * (w.at(t, a) - p.pca_mean[a]);
                sum += s;
                sum2 += s * s;
            }
        double m = sum / n;
        return sum2 / n - m * m;
    };

    std::array<double, 3> main = {p.pca_axis[0], p.pca_axis[1], p.pca_axis[2]};
    double v_main = projection_variance(main);

    // two perpendicular directions
    std::array<double, 3> u = {-main[1], main[0], 0.0};
    double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (double& c : u) c /= un;
    std::array<double, 3> v = {main[1] * u[2] - main[2] * u[1], main[2] * u[0] - main[0] * u[2],
                               main[0] * u[1] - main[1] * u[0]};
    CHECK(v_main >= projection_variance(u));
    CHECK(v_main >= projection_variance(v));
}

TEST_CASE("at least 99% of the fitting corpus projects inside the minmax bounds") {
    auto ws = corpus(kModeNormal, 200, 52);
    Preproc p = fit_preproc(ws);
    std::size_t inside = 0, total = 0;
    for (const auto& w : ws)
        for (std::size_t t = 0; t < kWindowLen; ++t, ++total) {
            double s = 0.0;
            for (int a = 0; a < 3; ++a) s += p.pca_axis[a] * (w.at(t, a) - p.pca_mean[a]);
            if (s >= p.minmax_lo && s <= p.minmax_hi) ++inside;
        }
    CHECK(static_cast<double>(inside) / total >= 0.99);
}

TEST_CASE("fit_preproc rejects tiny and degenerate corpora") {
    CHECK_THROWS_AS(fit_preproc(std::vector<StreamWindow>(50)), DomainError);
    // all-zero corpus: rank-0 covariance
    CHECK_THROWS_AS(fit_preproc(std::vector<StreamWindow>(150)), DomainError);
}

TEST_CASE("nearest-centroid on noise-free summary features separates the modes") {
    // sanity floor: per-axis mean and RMS deviation, 6-dim
    auto features = [](const StreamWindow& w) {
        std::array<double, 6> f{};
        for (int a = 0; a < 3; ++a) {
            double m = 0.0;
            for (std::size_t t = 0; t < kWindowLen; ++t) m += w.at(t, a);
            m /= kWindowLen;
            double s = 0.0;
            for (std::size_t t = 0; t < kWindowLen; ++t) s += (w.at(t, a) - m) * (w.at(t, a) - m);
            f[a] = m;
            f[3 + a] = std::sqrt(s / kWindowLen);
        }
        return f;
    };

    std::vector<std::array<double, 6>> feats;
    std::vector<int> labels;
    std::array<std::array<double, 6>, 3> centroid{};
    for (int mode = 0; mode <= 2; ++mode) {
        auto ws = corpus(mode, 30, 60 + mode, 0.0f);
        for (const auto& w : ws) {
            auto f = features(w);
            feats.push_back(f);
            labels.push_back(mode);
            for (int i = 0; i < 6; ++i) centroid[mode][i] += f[i] / 30.0;
        }
    }
    for (std::size_t i = 0; i < feats.size(); ++i) {
        int best = 0;
        double best_d = 1e300;
        for (int mode = 0; mode <= 2; ++mode) {
            double d = 0.0;
            for (int j = 0; j < 6; ++j)
                d += (feats[i][j] - centroid[mode][j]) * (feats[i][j] - centroid[mode][j]);
            if (d < best_d) {
                best_d = d;
                best = mode;
            }
        }
        CHECK(best == labels[i]);
    }
}

TEST_CASE("corpus CSV round-trips windows and labels") {
    auto ws = corpus(kModeTilted, 5, 70);
    ws[2].mode = kModeNormal;
    auto path = std::filesystem::temp_directory_path() / "tinyol_corpus_test.csv";
    write_corpus_csv(path.string(), ws);
    auto back = read_corpus_csv(path.string());
    REQUIRE(back.size() == ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i) {
        CHECK(back[i].samples == ws[i].samples);
        CHECK(back[i].mode == ws[i].mode);
    }

    // streaming scan sees the same windows in order
    std::size_t seen = 0;
    for_each_window_csv(path.string(), [&](const StreamWindow& w) {
        CHECK(w.samples == ws[seen].samples);
        ++seen;
    });
    CHECK(seen == ws.size());
    std::filesystem::remove(path);
}
