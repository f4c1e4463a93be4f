#include "tinyol/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace tinyol {

float sigmoid(float x) {
    return 1.0f / (1.0f + std::exp(-x));
}

float apply_activation(Activation act, float x) {
    switch (act) {
        case Activation::Identity: return x;
        case Activation::Relu: return x > 0.0f ? x : 0.0f;
        case Activation::Sigmoid: return sigmoid(x);
    }
    throw DomainError("unknown activation id");
}

float activation_derivative(Activation act, float pre, float post) {
    switch (act) {
        case Activation::Identity: return 1.0f;
        case Activation::Relu: return pre > 0.0f ? 1.0f : 0.0f;
        case Activation::Sigmoid: return post * (1.0f - post);
    }
    throw DomainError("unknown activation id");
}

Vec dense_forward(const Mat& W, const Vec& b, const Vec& x, Activation act) {
    if (W.cols != x.size())
        throw ShapeError("dense_forward: W.cols=" + std::to_string(W.cols) +
                         " vs x.len=" + std::to_string(x.size()));
    if (W.rows != b.size())
        throw ShapeError("dense_forward: W.rows=" + std::to_string(W.rows) +
                         " vs b.len=" + std::to_string(b.size()));
    Vec y(W.rows);
    for (std::size_t i = 0; i < W.rows; ++i) {
        float acc = b[i];
        const float* row = &W.v[i * W.cols];
        for (std::size_t j = 0; j < W.cols; ++j) acc += row[j] * x[j];
        y[i] = apply_activation(act, acc);
    }
    return y;
}

Vec softmax(const Vec& z) {
    if (z.empty()) throw ShapeError("softmax: empty input");
    float m = *std::max_element(z.begin(), z.end());
    Vec out(z.size());
    float sum = 0.0f;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - m);
        sum += out[i];
    }
    for (float& o : out) o /= sum;
    return out;
}

std::uint64_t Rng::next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double std) {
    if (std < 0.0) throw DomainError("rng_normal: std < 0");
    double u1 = uniform();
    double u2 = uniform();
    // 1-u1 is in (0, 1], keeps the log finite
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return mean + std * (r * std::cos(2.0 * 3.14159265358979323846 * u2));
}

std::size_t Rng::index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
}

}  // namespace tinyol
