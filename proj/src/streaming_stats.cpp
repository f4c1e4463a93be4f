#include "tinyol/streaming_stats.hpp"

#include <cmath>
#include <cstring>

namespace tinyol {

namespace {
constexpr double kVarEpsilon = 1e-8;
}

RunningStats::RunningStats(std::size_t dim) : mean_(dim, 0.0L), m2_(dim, 0.0L) {
    if (dim == 0) throw ShapeError("RunningStats: dim must be positive");
}

void RunningStats::update(const Vec& x) {
    if (x.size() != mean_.size())
        throw ShapeError("RunningStats::update: expected " + std::to_string(mean_.size()) +
                         " features, got " + std::to_string(x.size()));
    ++n_;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        long double xi = x[i];
        long double delta = xi - mean_[i];
        mean_[i] += delta / static_cast<long double>(n_);
        m2_[i] += delta * (xi - mean_[i]);
    }
}

Vec RunningStats::standardize(const Vec& x) const {
    if (x.size() != mean_.size())
        throw ShapeError("RunningStats::standardize: expected " + std::to_string(mean_.size()) +
                         " features, got " + std::to_string(x.size()));
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double centered = static_cast<double>(x[i]) - static_cast<double>(mean_[i]);
        if (n_ < 2) {
            out[i] = static_cast<float>(centered);  // variance treated as 1
        } else {
            out[i] = static_cast<float>(centered / std::sqrt(variance(i) + kVarEpsilon));
        }
    }
    return out;
}

std::vector<std::uint8_t> RunningStats::serialize() const {
    std::vector<std::uint8_t> out(sizeof(std::uint64_t) + mean_.size() * 2 * sizeof(double));
    std::size_t off = 0;
    std::memcpy(out.data(), &n_, sizeof(n_));
    off += sizeof(n_);
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        double m = static_cast<double>(mean_[i]);
        double s = static_cast<double>(m2_[i]);
        std::memcpy(out.data() + off, &m, sizeof(m));
        off += sizeof(m);
        std::memcpy(out.data() + off, &s, sizeof(s));
        off += sizeof(s);
    }
    return out;
}

}  // namespace tinyol
