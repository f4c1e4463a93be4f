#pragma once

#include <cstdint>
#include <vector>

#include "tinyol/frozen_model.hpp"
#include "tinyol/numeric.hpp"

namespace tinyol {

// Per-output error term used by the regression update:
//   Bce          delta = (x' - x), exact gradient of BCE through a sigmoid
//   MseSigmoid   delta = (x' - x) * x' * (1 - x')
//   PaperLiteral delta = (x' - x) * s(x') * (1 - s(x')), s applied to the
//                already-activated output
enum class GradRule : std::uint8_t { Bce = 0, MseSigmoid = 1, PaperLiteral = 2 };

// Trainable sigmoid output layer replacing the frozen model's final layer.
// Single-sample SGD; no internal sample buffer.
class RegressionHead {
public:
    RegressionHead(Mat W, Vec b, float alpha, GradRule rule);

    // head adopts the frozen model's final layer weights (fine-tune from
    // the pre-trained state)
    static RegressionHead from_final_layer(const FrozenModel& m, float alpha, GradRule rule);
    static RegressionHead random_init(std::size_t out_dim, std::size_t in_dim, float alpha,
                                      GradRule rule, Rng& rng);

    Vec predict(const Vec& a) const;

    // One SGD step on one (a, target) pair; returns the mean BCE loss.
    float update(const Vec& a, const Vec& target);

    // The per-output error term the update applies (before the a_j factor).
    Vec error_terms(const Vec& prediction, const Vec& target) const;

    const Mat& weights() const { return W_; }
    const Vec& bias() const { return b_; }
    float alpha() const { return alpha_; }
    void set_alpha(float alpha);
    GradRule rule() const { return rule_; }
    std::size_t in_dim() const { return W_.cols; }
    std::size_t out_dim() const { return W_.rows; }

private:
    Mat W_;
    Vec b_;
    float alpha_;
    GradRule rule_;
};

// Softmax classification head over the 5 extracted features, with dynamic
// class growth. Starts at k = 1.
class SoftmaxHead {
public:
    SoftmaxHead(std::size_t feature_dim, float alpha);
    SoftmaxHead(Mat W, Vec b, float alpha);

    Vec predict(const Vec& f) const;

    // One SGD step for sample (f, y); returns -log p_y.
    float update(const Vec& f, std::size_t y);

    // Appends a zero-initialized class row; existing rows are untouched.
    std::size_t add_class();

    std::size_t class_count() const { return W_.rows; }
    std::size_t feature_dim() const { return W_.cols; }
    const Mat& weights() const { return W_; }
    const Vec& bias() const { return b_; }
    float alpha() const { return alpha_; }
    void set_alpha(float alpha);

private:
    Mat W_;
    Vec b_;
    float alpha_;
};

float mean_bce_loss(const Vec& prediction, const Vec& target);

}  // namespace tinyol
