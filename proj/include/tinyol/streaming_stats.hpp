#pragma once

#include <cstdint>
#include <vector>

#include "tinyol/numeric.hpp"

namespace tinyol {

// Per-feature running mean/variance (Welford one-pass recurrence) with
// streaming standardization. State size is constant in the stream length.
// Accumulators are extended precision so the result tracks a two-pass
// computation to tight absolute tolerance even over 1e6-value streams.
class RunningStats {
public:
    explicit RunningStats(std::size_t dim);

    void update(const Vec& x);
    Vec standardize(const Vec& x) const;

    std::size_t dim() const { return mean_.size(); }
    std::uint64_t count() const { return n_; }
    double mean(std::size_t i) const { return static_cast<double>(mean_[i]); }
    // population variance m2/n; 0 before any sample
    double variance(std::size_t i) const {
        return n_ == 0 ? 0.0 : static_cast<double>(m2_[i] / static_cast<long double>(n_));
    }

    // fixed-size state dump, used for O(1)-memory checks and snapshots
    std::vector<std::uint8_t> serialize() const;

private:
    std::uint64_t n_ = 0;
    std::vector<long double> mean_;
    std::vector<long double> m2_;
};

}  // namespace tinyol
