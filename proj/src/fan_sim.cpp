#include "tinyol/fan_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tinyol {

namespace {

constexpr double kPi = 3.14159265358979323846;

// waveform parameters per mode
constexpr double kNormalAmp[3] = {0.3, 0.2, 0.1};
constexpr double kNormalNoise = 0.02;
constexpr double kStuckDc[3] = {0.1, 0.05, -0.05};
constexpr double kStuckNoise = 0.05;
constexpr double kTiltedAmp[3] = {0.5, 0.1, 0.4};
constexpr double kTiltedWobble = 0.4;  // relative weight of the 0.5*f0 component
constexpr double kTiltedNoise = 0.03;
constexpr double kAxisPhase[3] = {0.0, 0.5, 1.0};

std::array<std::array<double, 3>, 3> rotation_matrix(const DriftConfig& d) {
    double rx = d.rx_deg * kPi / 180.0;
    double ry = d.ry_deg * kPi / 180.0;
    double rz = d.rz_deg * kPi / 180.0;
    double cx = std::cos(rx), sx = std::sin(rx);
    double cy = std::cos(ry), sy = std::sin(ry);
    double cz = std::cos(rz), sz = std::sin(rz);
    // R = Rz * Ry * Rx
    return {{{cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx},
             {sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx},
             {-sy, cy * sx, cy * cx}}};
}

}  // namespace

StreamWindow generate_window(int mode, Rng& rng, std::uint64_t index,
                             const std::optional<DriftConfig>& drift, float noise_scale) {
    if (mode < kModeNormal || mode > kModeTilted)
        throw DomainError("unknown fan mode " + std::to_string(mode));

    StreamWindow w;
    w.mode = mode;
    w.index = index;
    double phase = rng.uniform() * 2.0 * kPi;
    double omega = 2.0 * kPi * kFanFreqHz / kSampleRateHz;  // radians per sample

    for (std::size_t t = 0; t < kWindowLen; ++t) {
        for (std::size_t a = 0; a < kAxes; ++a) {
            double v = 0.0;
            double noise = 0.0;
            switch (mode) {
                case kModeNormal:
                    v = kNormalAmp[a] * std::sin(omega * static_cast<double>(t) + phase + kAxisPhase[a]);
                    noise = kNormalNoise;
                    break;
                case kModeStuck:
                    // blades blocked: DC only, rotation fundamental absent
                    v = kStuckDc[a];
                    noise = kStuckNoise;
                    break;
                case kModeTilted:
                    v = kTiltedAmp[a] *
                        (std::sin(omega * static_cast<double>(t) + phase + kAxisPhase[a]) +
                         kTiltedWobble *
                             std::sin(0.5 * omega * static_cast<double>(t) + 0.5 * phase + kAxisPhase[a]));
                    noise = kTiltedNoise;
                    break;
            }
            v += rng.normal(0.0, noise * static_cast<double>(noise_scale));
            w.at(t, a) = static_cast<float>(v);
        }
    }
    if (drift) return apply_drift(w, *drift);
    return w;
}

StreamWindow apply_drift(const StreamWindow& w, const DriftConfig& d) {
    auto R = rotation_matrix(d);
    StreamWindow out = w;
    for (std::size_t t = 0; t < kWindowLen; ++t) {
        double in[3] = {w.at(t, 0), w.at(t, 1), w.at(t, 2)};
        for (std::size_t a = 0; a < kAxes; ++a) {
            double v = R[a][0] * in[0] + R[a][1] * in[1] + R[a][2] * in[2];
            out.at(t, a) = static_cast<float>(static_cast<double>(d.gain) * v +
                                              static_cast<double>(d.offset[a]));
        }
    }
    return out;
}

Preproc fit_preproc(const std::vector<StreamWindow>& corpus) {
    if (corpus.size() < 100) throw DomainError("fit_preproc needs at least 100 windows");

    std::size_t n = corpus.size() * kWindowLen;
    double mean[3] = {0, 0, 0};
    for (const StreamWindow& w : corpus)
        for (std::size_t t = 0; t < kWindowLen; ++t)
            for (std::size_t a = 0; a < kAxes; ++a) mean[a] += w.at(t, a);
    for (double& m : mean) m /= static_cast<double>(n);

    double cov[3][3] = {};
    for (const StreamWindow& w : corpus)
        for (std::size_t t = 0; t < kWindowLen; ++t) {
            double d[3];
            for (std::size_t a = 0; a < kAxes; ++a) d[a] = w.at(t, a) - mean[a];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) cov[i][j] += d[i] * d[j];
        }
    double trace = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) cov[i][j] /= static_cast<double>(n);
        trace += cov[i][i];
    }
    if (trace <= 0.0) throw DomainError("fit_preproc: degenerate covariance");

    // power iteration for the top eigenvector
    double v[3] = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    for (int iter = 0; iter < 100; ++iter) {
        double next[3] = {};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) next[i] += cov[i][j] * v[j];
        double norm = std::sqrt(next[0] * next[0] + next[1] * next[1] + next[2] * next[2]);
        if (norm == 0.0) throw DomainError("fit_preproc: degenerate covariance");
        double delta = 0.0;
        for (int i = 0; i < 3; ++i) {
            next[i] /= norm;
            delta = std::max(delta, std::abs(next[i] - v[i]));
            v[i] = next[i];
        }
        if (delta < 1e-10) break;
    }
    // sign convention: largest-magnitude component positive
    int major = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v[i]) > std::abs(v[major])) major = i;
    if (v[major] < 0.0)
        for (double& c : v) c = -c;

    std::vector<double> projected;
    projected.reserve(n);
    for (const StreamWindow& w : corpus)
        for (std::size_t t = 0; t < kWindowLen; ++t) {
            double s = 0.0;
            for (std::size_t a = 0; a < kAxes; ++a) s += v[a] * (w.at(t, a) - mean[a]);
            projected.push_back(s);
        }
    std::sort(projected.begin(), projected.end());
    auto quantile = [&](double q) {
        double pos = q * static_cast<double>(projected.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, projected.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return projected[lo] * (1.0 - frac) + projected[hi] * frac;
    };

    Preproc p;
    p.pca_mean = {static_cast<float>(mean[0]), static_cast<float>(mean[1]),
                  static_cast<float>(mean[2])};
    p.pca_axis = {static_cast<float>(v[0]), static_cast<float>(v[1]), static_cast<float>(v[2])};
    p.minmax_lo = static_cast<float>(quantile(0.005));
    p.minmax_hi = static_cast<float>(quantile(0.995));
    if (!(p.minmax_hi > p.minmax_lo)) throw DomainError("fit_preproc: degenerate projection range");
    return p;
}

void write_corpus_csv(const std::string& path, const std::vector<StreamWindow>& windows) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f.precision(9);  // float round-trip
    f << "t,ax,ay,az,mode\n";
    std::uint64_t t_global = 0;
    for (const StreamWindow& w : windows) {
        for (std::size_t t = 0; t < kWindowLen; ++t, ++t_global) {
            f << t_global << ',' << w.at(t, 0) << ',' << w.at(t, 1) << ',' << w.at(t, 2) << ','
              << w.mode << '\n';
        }
    }
    if (!f) throw IoError("write failed: " + path);
}

namespace {
void scan_corpus(const std::string& path, const std::function<void(const StreamWindow&)>& fn) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty corpus: " + path);

    StreamWindow w;
    std::size_t row_in_window = 0;
    std::uint64_t window_index = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double vals[4];
        std::getline(ss, field, ',');  // t, ignored
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ss, field, ',')) throw IoError("malformed corpus row: " + line);
            vals[i] = std::stod(field);
        }
        for (std::size_t a = 0; a < kAxes; ++a)
            w.at(row_in_window, a) = static_cast<float>(vals[a]);
        w.mode = static_cast<int>(vals[3]);
        if (++row_in_window == kWindowLen) {
            w.index = window_index++;
            fn(w);
            row_in_window = 0;
        }
    }
    if (row_in_window != 0) throw IoError("corpus does not end on a window boundary: " + path);
}
}  // namespace

void for_each_window_csv(const std::string& path,
                         const std::function<void(const StreamWindow&)>& fn) {
    scan_corpus(path, fn);
}

std::vector<StreamWindow> read_corpus_csv(const std::string& path) {
    std::vector<StreamWindow> out;
    scan_corpus(path, [&](const StreamWindow& w) { out.push_back(w); });
    return out;
}

}  // namespace tinyol
