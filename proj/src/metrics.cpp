#include "tinyol/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace tinyol {

void ConfusionMatrix::grow_to(std::size_t k) {
    if (k <= k_) return;
    std::vector<std::uint64_t> grown(k * k, 0);
    for (std::size_t t = 0; t < k_; ++t)
        for (std::size_t p = 0; p < k_; ++p) grown[t * k + p] = counts_[t * k_ + p];
    counts_ = std::move(grown);
    k_ = k;
}

void ConfusionMatrix::record(std::size_t predicted, std::size_t truth) {
    grow_to(std::max(predicted, truth) + 1);
    ++counts_[truth * k_ + predicted];
}

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::vector<double> ConfusionMatrix::f1_per_class() const {
    if (total() == 0) throw DomainError("F1 undefined on an empty confusion matrix");
    std::vector<double> f1(k_, 0.0);
    for (std::size_t c = 0; c < k_; ++c) {
        std::uint64_t tp = count(c, c);
        std::uint64_t fp = 0, fn = 0;
        for (std::size_t o = 0; o < k_; ++o) {
            if (o == c) continue;
            fp += count(o, c);
            fn += count(c, o);
        }
        double precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        double recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        f1[c] = (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    }
    return f1;
}

double ConfusionMatrix::macro_f1() const {
    std::vector<double> f1 = f1_per_class();
    return std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(f1.size());
}

MseAccumulator::MseAccumulator(double max_edge, std::size_t bins)
    : max_edge_(max_edge), counts_(bins + 1, 0) {
    if (!(max_edge > 0.0) || bins == 0) throw DomainError("MseAccumulator: bad histogram config");
}

void MseAccumulator::record(double mse) {
    if (mse < 0.0) throw DomainError("mse must be non-negative");
    if (n_ == 0) {
        min_ = max_ = mse;
    } else {
        min_ = std::min(min_, mse);
        max_ = std::max(max_, mse);
    }
    sum_ += mse;
    ++n_;
    std::size_t regular = counts_.size() - 1;
    if (mse >= max_edge_) {
        ++counts_[regular];
    } else {
        auto idx = static_cast<std::size_t>(mse / max_edge_ * static_cast<double>(regular));
        ++counts_[std::min(idx, regular - 1)];
    }
}

double MseAccumulator::bin_lo(std::size_t i) const {
    std::size_t regular = counts_.size() - 1;
    return i >= regular ? max_edge_
                        : max_edge_ * static_cast<double>(i) / static_cast<double>(regular);
}

double MseAccumulator::bin_hi(std::size_t i) const {
    std::size_t regular = counts_.size() - 1;
    return i >= regular ? std::numeric_limits<double>::infinity()
                        : max_edge_ * static_cast<double>(i + 1) / static_cast<double>(regular);
}

}  // namespace tinyol
