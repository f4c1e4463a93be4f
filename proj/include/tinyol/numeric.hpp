#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tinyol/error.hpp"

namespace tinyol {

// Model arithmetic runs in 32-bit floats throughout (MCU-like numerics);
// statistical accumulators elsewhere use wider types.
using Vec = std::vector<float>;

struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> v;  // row-major, rows*cols

    Mat() = default;
    Mat(std::size_t r, std::size_t c, float fill = 0.0f) : rows(r), cols(c), v(r * c, fill) {}

    float& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    float at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0f;
        return m;
    }

    bool operator==(const Mat&) const = default;
};

enum class Activation : std::uint8_t { Identity = 0, Relu = 1, Sigmoid = 2 };

float sigmoid(float x);
float apply_activation(Activation act, float x);
float activation_derivative(Activation act, float pre, float post);

// y[i] = act(sum_j W[i,j]*x[j] + b[i])
Vec dense_forward(const Mat& W, const Vec& b, const Vec& x, Activation act);

// Max-subtracted, order-preserving; output sums to 1.
Vec softmax(const Vec& z);

// Deterministic splitmix64-based generator; same seed gives the same
// sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // uniform in [0, 1)
    double uniform();
    // Box-Muller from two uniform draws; std == 0 returns mean exactly.
    double normal(double mean, double std);
    std::size_t index(std::size_t n);

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = rng.index(i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace tinyol
