#pragma once

#include <cstdint>
#include <vector>

#include "tinyol/error.hpp"

namespace tinyol {

inline constexpr std::size_t kWindowLen = 40;  // timesteps per window
inline constexpr std::size_t kAxes = 3;

// One 40-step, 3-axis accelerometer window; the unit of streaming.
struct StreamWindow {
    // row-major [timestep][axis], g units
    std::vector<float> samples;
    int mode = -1;  // ground-truth class, -1 when unlabeled
    std::uint64_t index = 0;

    StreamWindow() : samples(kWindowLen * kAxes, 0.0f) {}

    float& at(std::size_t t, std::size_t axis) { return samples[t * kAxes + axis]; }
    float at(std::size_t t, std::size_t axis) const { return samples[t * kAxes + axis]; }

    void check_shape() const {
        if (samples.size() != kWindowLen * kAxes)
            throw ShapeError("window must be 40x3, got " + std::to_string(samples.size()) +
                             " samples");
    }
};

}  // namespace tinyol
