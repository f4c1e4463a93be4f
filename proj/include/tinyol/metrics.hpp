#pragma once

#include <cstdint>
#include <vector>

#include "tinyol/error.hpp"

namespace tinyol {

// Streaming confusion matrix (row = truth, col = prediction). Grows when a
// class index beyond the current size is recorded.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {}

    void record(std::size_t predicted, std::size_t truth);

    std::size_t class_count() const { return k_; }
    std::uint64_t count(std::size_t truth, std::size_t predicted) const {
        return counts_[truth * k_ + predicted];
    }
    std::uint64_t total() const;

    // precision/recall/F1 per class, 0/0 -> 0 convention
    std::vector<double> f1_per_class() const;
    double macro_f1() const;

private:
    void grow_to(std::size_t k);

    std::size_t k_ = 0;
    std::vector<std::uint64_t> counts_;
};

// Fixed-size MSE distribution accumulator: uniform bins over [0, max_edge]
// plus an overflow bin, and running min/max/mean.
class MseAccumulator {
public:
    MseAccumulator(double max_edge, std::size_t bins = 50);

    void record(double mse);

    std::size_t bin_count() const { return counts_.size(); }  // includes overflow
    std::uint64_t bin(std::size_t i) const { return counts_[i]; }
    double bin_lo(std::size_t i) const;
    double bin_hi(std::size_t i) const;  // +inf for the overflow bin

    std::uint64_t samples() const { return n_; }
    double min() const { return min_; }
    double max() const { return max_; }
    double mean() const { return n_ == 0 ? 0.0 : sum_ / static_cast<double>(n_); }

private:
    double max_edge_;
    std::vector<std::uint64_t> counts_;  // last bin is overflow
    std::uint64_t n_ = 0;
    double min_ = 0.0;
    double max_ = 0.0;
    double sum_ = 0.0;
};

}  // namespace tinyol
