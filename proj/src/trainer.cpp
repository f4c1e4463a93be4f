#include "tinyol/trainer.hpp"

#include <cmath>
#include <numeric>

namespace tinyol {

namespace {

constexpr Activation kAutoencoderActs[] = {Activation::Relu, Activation::Relu, Activation::Relu,
                                           Activation::Sigmoid};

std::vector<Layer> random_layers(const std::vector<std::size_t>& dims,
                                 const std::vector<Activation>& acts, Rng& rng) {
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.W = Mat(dims[l + 1], dims[l]);
        double scale = std::sqrt(1.0 / static_cast<double>(dims[l]));
        for (float& w : layer.W.v) w = static_cast<float>(rng.normal(0.0, scale));
        layer.b = Vec(dims[l + 1], 0.0f);
        layer.act = acts[l];
        layers.push_back(std::move(layer));
    }
    return layers;
}

struct ForwardCache {
    std::vector<Vec> post;  // post[0] = input, post[l+1] = layer l output
    std::vector<Vec> pre;   // pre[l] = layer l pre-activation
};

ForwardCache forward_cached(const std::vector<Layer>& layers, const Vec& x) {
    ForwardCache c;
    c.post.push_back(x);
    for (const Layer& l : layers) {
        const Vec& in = c.post.back();
        Vec z(l.W.rows);
        for (std::size_t i = 0; i < l.W.rows; ++i) {
            float acc = l.b[i];
            const float* row = &l.W.v[i * l.W.cols];
            for (std::size_t j = 0; j < l.W.cols; ++j) acc += row[j] * in[j];
            z[i] = acc;
        }
        Vec a(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) a[i] = apply_activation(l.act, z[i]);
        c.pre.push_back(std::move(z));
        c.post.push_back(std::move(a));
    }
    return c;
}

struct Grads {
    std::vector<Mat> gW;
    std::vector<Vec> gb;

    explicit Grads(const std::vector<Layer>& layers) {
        for (const Layer& l : layers) {
            gW.emplace_back(l.W.rows, l.W.cols);
            gb.emplace_back(l.W.rows, 0.0f);
        }
    }
    void zero() {
        for (Mat& m : gW) std::fill(m.v.begin(), m.v.end(), 0.0f);
        for (Vec& b : gb) std::fill(b.begin(), b.end(), 0.0f);
    }
};

// Per-sample loss (mean over output dims) and gradient accumulation.
double backprop_sample(const std::vector<Layer>& layers, const Vec& x, const Vec& target,
                       TrainLoss loss, Grads& grads) {
    ForwardCache c = forward_cached(layers, x);
    const Vec& out = c.post.back();
    std::size_t n_out = out.size();
    double inv_n = 1.0 / static_cast<double>(n_out);

    double loss_value = 0.0;
    Vec delta(n_out);  // dL/dz of the output layer
    const Layer& last = layers.back();
    for (std::size_t i = 0; i < n_out; ++i) {
        double p = out[i], t = target[i];
        if (loss == TrainLoss::Mse) {
            double d = p - t;
            loss_value += d * d * inv_n;
            delta[i] = static_cast<float>(2.0 * d * inv_n *
                                          activation_derivative(last.act, c.pre.back()[i], out[i]));
        } else {
            double pc = std::min(std::max(p, 1e-7), 1.0 - 1e-7);
            loss_value += -(t * std::log(pc) + (1.0 - t) * std::log(1.0 - pc)) * inv_n;
            if (last.act != Activation::Sigmoid)
                throw UnsupportedError("BCE training loss requires a sigmoid output layer");
            delta[i] = static_cast<float>((p - t) * inv_n);
        }
    }

    for (std::size_t l = layers.size(); l-- > 0;) {
        const Layer& layer = layers[l];
        const Vec& in = c.post[l];
        Mat& gW = grads.gW[l];
        Vec& gb = grads.gb[l];
        for (std::size_t i = 0; i < layer.W.rows; ++i) {
            float d = delta[i];
            float* grow = &gW.v[i * gW.cols];
            for (std::size_t j = 0; j < layer.W.cols; ++j) grow[j] += d * in[j];
            gb[i] += d;
        }
        if (l == 0) break;
        Vec next_delta(layer.W.cols, 0.0f);
        for (std::size_t i = 0; i < layer.W.rows; ++i) {
            float d = delta[i];
            const float* row = &layer.W.v[i * layer.W.cols];
            for (std::size_t j = 0; j < layer.W.cols; ++j) next_delta[j] += row[j] * d;
        }
        const Layer& prev = layers[l - 1];
        for (std::size_t j = 0; j < next_delta.size(); ++j)
            next_delta[j] *= activation_derivative(prev.act, c.pre[l - 1][j], c.post[l][j]);
        delta = std::move(next_delta);
    }
    return loss_value;
}

void apply_step(std::vector<Layer>& layers, const Grads& grads, float alpha, std::size_t batch) {
    float scale = alpha / static_cast<float>(batch);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t i = 0; i < layers[l].W.v.size(); ++i)
            layers[l].W.v[i] -= scale * grads.gW[l].v[i];
        for (std::size_t i = 0; i < layers[l].b.size(); ++i)
            layers[l].b[i] -= scale * grads.gb[l][i];
    }
}

}  // namespace

FrozenModel train_autoencoder(const Dataset& data, const TrainConfig& cfg,
                              std::vector<double>* loss_curve) {
    if (data.inputs.size() < 500)
        throw DomainError("train_autoencoder needs at least 500 windows, got " +
                          std::to_string(data.inputs.size()));
    for (const Vec& x : data.inputs)
        if (x.size() != kAutoencoderDims[0])
            throw ShapeError("autoencoder input must have length 40");
    if (cfg.batch_size == 0 || cfg.batch_size > data.inputs.size())
        throw DomainError("batch_size must be in [1, dataset size]");

    Rng rng(cfg.seed);
    std::vector<std::size_t> dims(std::begin(kAutoencoderDims), std::end(kAutoencoderDims));
    std::vector<Activation> acts(std::begin(kAutoencoderActs), std::end(kAutoencoderActs));
    std::vector<Layer> layers = random_layers(dims, acts, rng);

    std::vector<double> curve;
    std::vector<std::size_t> order(data.inputs.size());
    std::iota(order.begin(), order.end(), 0);
    Grads grads(layers);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(start + cfg.batch_size, order.size());
            grads.zero();
            for (std::size_t i = start; i < end; ++i) {
                const Vec& x = data.inputs[order[i]];
                epoch_loss += backprop_sample(layers, x, x, cfg.loss, grads);
            }
            apply_step(layers, grads, cfg.alpha, end - start);
        }
        curve.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    if (loss_curve) *loss_curve = curve;
    if (cfg.epochs >= 2 && curve.back() >= curve.front())
        throw ConvergenceError("training loss did not decrease", curve);
    return FrozenModel(std::move(layers), kEmbeddingLayerIndex);
}

SoftmaxHead train_softmax_offline(const Dataset& features, const TrainConfig& cfg) {
    if (features.labels.size() != features.inputs.size() || features.inputs.empty())
        throw DomainError("train_softmax_offline needs labeled features");
    int max_label = 0;
    for (int l : features.labels) {
        if (l < 0) throw DomainError("negative label");
        max_label = std::max(max_label, l);
    }
    std::size_t k = static_cast<std::size_t>(max_label) + 1;
    std::size_t d = features.inputs[0].size();

    SoftmaxHead head(Mat(k, d), Vec(k, 0.0f), cfg.alpha);
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(features.inputs.size());
    std::iota(order.begin(), order.end(), 0);

    Mat gW(k, d);
    Vec gb(k);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(start + cfg.batch_size, order.size());
            std::fill(gW.v.begin(), gW.v.end(), 0.0f);
            std::fill(gb.begin(), gb.end(), 0.0f);
            for (std::size_t i = start; i < end; ++i) {
                const Vec& f = features.inputs[order[i]];
                auto y = static_cast<std::size_t>(features.labels[order[i]]);
                Vec p = head.predict(f);
                for (std::size_t c = 0; c < k; ++c) {
                    float g = p[c] - (c == y ? 1.0f : 0.0f);
                    for (std::size_t j = 0; j < d; ++j) gW.at(c, j) += g * f[j];
                    gb[c] += g;
                }
            }
            float scale = cfg.alpha / static_cast<float>(end - start);
            Mat W = head.weights();
            Vec b = head.bias();
            for (std::size_t i = 0; i < W.v.size(); ++i) W.v[i] -= scale * gW.v[i];
            for (std::size_t i = 0; i < b.size(); ++i) b[i] -= scale * gb[i];
            head = SoftmaxHead(std::move(W), std::move(b), cfg.alpha);
        }
    }
    return head;
}

namespace {

// double-precision forward for finite differences
double loss64_mse(const std::vector<Layer>& layers, const std::vector<std::vector<double>>& W64,
                  const std::vector<std::vector<double>>& b64, const Vec& x, const Vec& target,
                  double* min_relu_pre = nullptr) {
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        std::size_t rows = layers[l].W.rows, cols = layers[l].W.cols;
        std::vector<double> next(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            double acc = b64[l][i];
            for (std::size_t j = 0; j < cols; ++j) acc += W64[l][i * cols + j] * cur[j];
            if (layers[l].act == Activation::Relu && min_relu_pre)
                *min_relu_pre = std::min(*min_relu_pre, std::abs(acc));
            switch (layers[l].act) {
                case Activation::Identity: next[i] = acc; break;
                case Activation::Relu: next[i] = acc > 0.0 ? acc : 0.0; break;
                case Activation::Sigmoid: next[i] = 1.0 / (1.0 + std::exp(-acc)); break;
            }
        }
        cur = std::move(next);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
        double dd = cur[i] - static_cast<double>(target[i]);
        loss += dd * dd;
    }
    return loss / static_cast<double>(cur.size());
}

}  // namespace

double backprop_grad_check(std::uint64_t seed, int instances) {
    constexpr double h = 1e-3;
    Rng rng(seed);
    std::vector<std::size_t> dims = {4, 3, 2, 3, 4};
    std::vector<Activation> acts = {Activation::Relu, Activation::Relu, Activation::Relu,
                                    Activation::Sigmoid};
    double worst = 0.0;
    int done = 0, attempts = 0;
    while (done < instances && attempts < instances * 50) {
        ++attempts;
        Rng init(rng.next_u64());
        std::vector<Layer> layers = random_layers(dims, acts, init);
        for (Layer& l : layers)
            for (float& b : l.b) b = static_cast<float>(init.normal(0.0, 0.3));
        Vec x(4), target(4);
        for (float& v : x) v = static_cast<float>(init.uniform() * 2.0 - 1.0);
        for (float& v : target) v = static_cast<float>(0.1 + 0.8 * init.uniform());

        std::vector<std::vector<double>> W64, b64;
        for (const Layer& l : layers) {
            W64.emplace_back(l.W.v.begin(), l.W.v.end());
            b64.emplace_back(l.b.begin(), l.b.end());
        }
        // relu kinks break finite differences; skip instances that sit near one
        double min_pre = 1e300;
        loss64_mse(layers, W64, b64, x, target, &min_pre);
        if (min_pre < 1e-2) continue;
        ++done;

        Grads grads(layers);
        backprop_sample(layers, x, target, TrainLoss::Mse, grads);

        for (std::size_t l = 0; l < layers.size(); ++l) {
            auto check = [&](std::vector<double>& param, std::size_t idx, double analytic) {
                double base = param[idx];
                param[idx] = base + h;
                double up = loss64_mse(layers, W64, b64, x, target);
                param[idx] = base - h;
                double down = loss64_mse(layers, W64, b64, x, target);
                param[idx] = base;
                double fd = (up - down) / (2.0 * h);
                double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
                worst = std::max(worst, std::abs(fd - analytic) / denom);
            };
            for (std::size_t i = 0; i < grads.gW[l].v.size(); ++i)
                check(W64[l], i, grads.gW[l].v[i]);
            for (std::size_t i = 0; i < grads.gb[l].size(); ++i)
                check(b64[l], i, grads.gb[l][i]);
        }
    }
    if (done < instances)
        throw DomainError("backprop_grad_check could not sample enough kink-free instances");
    return worst;
}

}  // namespace tinyol
