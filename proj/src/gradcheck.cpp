#include "tinyol/gradcheck.hpp"

#include <cmath>
#include <vector>

namespace tinyol {

namespace {

constexpr double kStep = 1e-3;

double rel_err(double fd, double an) {
    double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
    return std::abs(fd - an) / denom;
}

// 64-bit forward of the regression head: sigmoid(W a + b)
std::vector<double> predict64(const std::vector<double>& W, const std::vector<double>& b,
                              const Vec& a, std::size_t out, std::size_t in) {
    std::vector<double> p(out);
    for (std::size_t i = 0; i < out; ++i) {
        double acc = b[i];
        for (std::size_t j = 0; j < in; ++j) acc += W[i * in + j] * static_cast<double>(a[j]);
        p[i] = 1.0 / (1.0 + std::exp(-acc));
    }
    return p;
}

double regression_loss64(GradRule rule, const std::vector<double>& W, const std::vector<double>& b,
                         const Vec& a, const Vec& target, std::size_t out, std::size_t in) {
    std::vector<double> p = predict64(W, b, a, out, in);
    double loss = 0.0;
    for (std::size_t i = 0; i < out; ++i) {
        double x = target[i];
        if (rule == GradRule::Bce) {
            loss += -(x * std::log(p[i]) + (1.0 - x) * std::log(1.0 - p[i]));
        } else {
            double d = p[i] - x;
            loss += 0.5 * d * d;
        }
    }
    return loss;
}

}  // namespace

double grad_check_regression(GradRule rule, Rng& rng, int instances) {
    if (rule == GradRule::PaperLiteral)
        throw UnsupportedError(
            "paper-literal rule has no loss whose exact gradient it is; no pairing exists");

    constexpr std::size_t out = 8, in = 6;
    double worst = 0.0;
    for (int inst = 0; inst < instances; ++inst) {
        Mat W(out, in);
        for (float& w : W.v) w = static_cast<float>(rng.normal(0.0, 0.5));
        Vec b(out);
        for (float& v : b) v = static_cast<float>(rng.normal(0.0, 0.5));
        Vec a(in), target(out);
        for (float& v : a) v = static_cast<float>(rng.uniform() * 2.0 - 1.0);
        for (float& v : target) v = static_cast<float>(0.05 + 0.9 * rng.uniform());

        RegressionHead head(W, b, 0.0f, rule);
        Vec delta = head.error_terms(head.predict(a), target);

        std::vector<double> W64(W.v.begin(), W.v.end());
        std::vector<double> b64(b.begin(), b.end());
        auto fd_at = [&](std::vector<double>& param, std::size_t idx) {
            double base = param[idx];
            param[idx] = base + kStep;
            double up = regression_loss64(rule, W64, b64, a, target, out, in);
            param[idx] = base - kStep;
            double down = regression_loss64(rule, W64, b64, a, target, out, in);
            param[idx] = base;
            return (up - down) / (2.0 * kStep);
        };
        for (std::size_t i = 0; i < out; ++i) {
            for (std::size_t j = 0; j < in; ++j) {
                double analytic = static_cast<double>(delta[i]) * static_cast<double>(a[j]);
                worst = std::max(worst, rel_err(fd_at(W64, i * in + j), analytic));
            }
            worst = std::max(worst, rel_err(fd_at(b64, i), static_cast<double>(delta[i])));
        }
    }
    return worst;
}

double grad_check_softmax(Rng& rng, int instances) {
    constexpr std::size_t d = 5;
    double worst = 0.0;
    for (int inst = 0; inst < instances; ++inst) {
        std::size_t k = 2 + rng.index(4);  // 2..5 classes
        Mat W(k, d);
        for (float& w : W.v) w = static_cast<float>(rng.normal(0.0, 0.5));
        Vec b(k);
        for (float& v : b) v = static_cast<float>(rng.normal(0.0, 0.5));
        Vec f(d);
        for (float& v : f) v = static_cast<float>(rng.uniform() * 2.0 - 1.0);
        std::size_t y = rng.index(k);

        SoftmaxHead head(W, b, 0.0f);
        Vec p = head.predict(f);

        std::vector<double> W64(W.v.begin(), W.v.end());
        std::vector<double> b64(b.begin(), b.end());
        auto loss64 = [&]() {
            std::vector<double> logits(k);
            double m = -1e300;
            for (std::size_t c = 0; c < k; ++c) {
                double acc = b64[c];
                for (std::size_t j = 0; j < d; ++j) acc += W64[c * d + j] * static_cast<double>(f[j]);
                logits[c] = acc;
                m = std::max(m, acc);
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < k; ++c) sum += std::exp(logits[c] - m);
            return -(logits[y] - m - std::log(sum));
        };
        auto fd_at = [&](std::vector<double>& param, std::size_t idx) {
            double base = param[idx];
            param[idx] = base + kStep;
            double up = loss64();
            param[idx] = base - kStep;
            double down = loss64();
            param[idx] = base;
            return (up - down) / (2.0 * kStep);
        };
        for (std::size_t c = 0; c < k; ++c) {
            double g = static_cast<double>(p[c]) - (c == y ? 1.0 : 0.0);
            for (std::size_t j = 0; j < d; ++j)
                worst = std::max(worst, rel_err(fd_at(W64, c * d + j), g * static_cast<double>(f[j])));
            worst = std::max(worst, rel_err(fd_at(b64, c), g));
        }
    }
    return worst;
}

}  // namespace tinyol
