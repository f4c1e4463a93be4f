#include "tinyol/online_head.hpp"

#include <cmath>

namespace tinyol {

namespace {
constexpr float kLogClamp = 1e-7f;
constexpr std::size_t kMaxClasses = 255;

float clamp_unit(float p) {
    if (p < kLogClamp) return kLogClamp;
    if (p > 1.0f - kLogClamp) return 1.0f - kLogClamp;
    return p;
}
}  // namespace

RegressionHead::RegressionHead(Mat W, Vec b, float alpha, GradRule rule)
    : W_(std::move(W)), b_(std::move(b)), alpha_(alpha), rule_(rule) {
    if (b_.size() != W_.rows) throw ShapeError("RegressionHead: bias/weight row mismatch");
    if (alpha_ <= 0.0f && alpha_ != 0.0f) throw DomainError("RegressionHead: alpha must be >= 0");
}

RegressionHead RegressionHead::from_final_layer(const FrozenModel& m, float alpha, GradRule rule) {
    const Layer& last = m.layer(m.layer_count() - 1);
    if (last.act != Activation::Sigmoid)
        throw UnsupportedError("regression head requires a sigmoid final layer");
    return RegressionHead(last.W, last.b, alpha, rule);
}

RegressionHead RegressionHead::random_init(std::size_t out_dim, std::size_t in_dim, float alpha,
                                           GradRule rule, Rng& rng) {
    Mat W(out_dim, in_dim);
    for (float& w : W.v) w = static_cast<float>(rng.normal(0.0, 0.05));
    return RegressionHead(std::move(W), Vec(out_dim, 0.0f), alpha, rule);
}

void RegressionHead::set_alpha(float alpha) {
    if (!(alpha >= 0.0f)) throw DomainError("RegressionHead: alpha must be >= 0");
    alpha_ = alpha;
}

Vec RegressionHead::predict(const Vec& a) const {
    return dense_forward(W_, b_, a, Activation::Sigmoid);
}

Vec RegressionHead::error_terms(const Vec& prediction, const Vec& target) const {
    Vec delta(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        float diff = prediction[i] - target[i];
        switch (rule_) {
            case GradRule::Bce:
                delta[i] = diff;
                break;
            case GradRule::MseSigmoid:
                delta[i] = diff * prediction[i] * (1.0f - prediction[i]);
                break;
            case GradRule::PaperLiteral: {
                float s = sigmoid(prediction[i]);
                delta[i] = diff * s * (1.0f - s);
                break;
            }
        }
    }
    return delta;
}

float mean_bce_loss(const Vec& prediction, const Vec& target) {
    if (prediction.size() != target.size()) throw ShapeError("bce: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        double p = clamp_unit(prediction[i]);
        double x = target[i];
        acc += -(x * std::log(p) + (1.0 - x) * std::log(1.0 - p));
    }
    return static_cast<float>(acc / static_cast<double>(prediction.size()));
}

float RegressionHead::update(const Vec& a, const Vec& target) {
    if (a.size() != W_.cols) throw ShapeError("update_regression: activation length mismatch");
    if (target.size() != W_.rows) throw ShapeError("update_regression: target length mismatch");
    for (float t : target)
        if (!(t >= 0.0f && t <= 1.0f))
            throw DomainError("update_regression: target outside [0,1]");

    Vec prediction = predict(a);
    Vec delta = error_terms(prediction, target);
    for (std::size_t i = 0; i < W_.rows; ++i) {
        float step = alpha_ * delta[i];
        float* row = &W_.v[i * W_.cols];
        for (std::size_t j = 0; j < W_.cols; ++j) row[j] -= step * a[j];
        b_[i] -= step;
    }
    return mean_bce_loss(prediction, target);
}

SoftmaxHead::SoftmaxHead(std::size_t feature_dim, float alpha)
    : W_(1, feature_dim), b_(1, 0.0f), alpha_(alpha) {
    if (feature_dim == 0) throw ShapeError("SoftmaxHead: feature_dim must be positive");
}

SoftmaxHead::SoftmaxHead(Mat W, Vec b, float alpha)
    : W_(std::move(W)), b_(std::move(b)), alpha_(alpha) {
    if (W_.rows == 0 || b_.size() != W_.rows) throw ShapeError("SoftmaxHead: bad dims");
}

void SoftmaxHead::set_alpha(float alpha) {
    if (!(alpha >= 0.0f)) throw DomainError("SoftmaxHead: alpha must be >= 0");
    alpha_ = alpha;
}

Vec SoftmaxHead::predict(const Vec& f) const {
    return softmax(dense_forward(W_, b_, f, Activation::Identity));
}

float SoftmaxHead::update(const Vec& f, std::size_t y) {
    if (y >= W_.rows)
        throw DomainError("update_softmax: label " + std::to_string(y) +
                          " >= class count " + std::to_string(W_.rows) +
                          " (add_class first)");
    Vec p = predict(f);
    for (std::size_t c = 0; c < W_.rows; ++c) {
        float g = p[c] - (c == y ? 1.0f : 0.0f);
        float step = alpha_ * g;
        float* row = &W_.v[c * W_.cols];
        for (std::size_t j = 0; j < W_.cols; ++j) row[j] -= step * f[j];
        b_[c] -= step;
    }
    return -std::log(clamp_unit(p[y]));
}

std::size_t SoftmaxHead::add_class() {
    if (W_.rows >= kMaxClasses)
        throw CapacityError("class count capped at " + std::to_string(kMaxClasses));
    Mat grown(W_.rows + 1, W_.cols);
    std::copy(W_.v.begin(), W_.v.end(), grown.v.begin());
    W_ = std::move(grown);
    b_.push_back(0.0f);
    return W_.rows - 1;
}

}  // namespace tinyol
