#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tinyol/frozen_model.hpp"
#include "tinyol/numeric.hpp"
#include "tinyol/window.hpp"

namespace tinyol {

// Fan operation modes
inline constexpr int kModeNormal = 0;
inline constexpr int kModeStuck = 1;
inline constexpr int kModeTilted = 2;

inline constexpr double kSampleRateHz = 119.0;
inline constexpr double kFanFreqHz = 20.0;

// Sensor repositioning model: per-sample rotation, gain, and offset.
struct DriftConfig {
    float rx_deg = 0.0f;
    float ry_deg = 0.0f;
    float rz_deg = 0.0f;
    float gain = 1.0f;
    std::array<float, 3> offset{0.0f, 0.0f, 0.0f};

    static DriftConfig none() { return {}; }
    static DriftConfig defaults() { return {5.0f, 5.0f, 5.0f, 1.05f, {0.02f, 0.0f, 0.0f}}; }
};

// One synthetic 40x3 vibration window. noise_scale lets tests run the
// generators noise-free; 1.0 is the nominal noise level.
StreamWindow generate_window(int mode, Rng& rng, std::uint64_t index = 0,
                             const std::optional<DriftConfig>& drift = std::nullopt,
                             float noise_scale = 1.0f);

StreamWindow apply_drift(const StreamWindow& w, const DriftConfig& d);

// PCA to 1-D (power iteration on the 3x3 sample covariance) plus
// percentile-based min-max bounds fitted on the corpus.
Preproc fit_preproc(const std::vector<StreamWindow>& corpus);

// Corpus CSV: header "t,ax,ay,az,mode", one row per timestep, windows as
// consecutive 40-row groups.
void write_corpus_csv(const std::string& path, const std::vector<StreamWindow>& windows);
std::vector<StreamWindow> read_corpus_csv(const std::string& path);
// Sequential scan keeping one window in memory at a time.
void for_each_window_csv(const std::string& path, const std::function<void(const StreamWindow&)>& fn);

}  // namespace tinyol
