#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "tinyol/metrics.hpp"
#include "tinyol/numeric.hpp"

using namespace tinyol;

TEST_CASE("confusion matrix counts and growth") {
    ConfusionMatrix cm;
    for (int i = 0; i < 10; ++i) cm.record(0, 0);
    CHECK(cm.class_count() == 1);
    CHECK(cm.count(0, 0) == 10);
    CHECK(cm.total() == 10);

    cm.record(1, 1);
    CHECK(cm.class_count() == 2);
    cm.record(2, 0);  // growth preserves old counts
    CHECK(cm.class_count() == 3);
    CHECK(cm.count(0, 0) == 10);
    CHECK(cm.count(1, 1) == 1);
    CHECK(cm.count(0, 2) == 1);
    CHECK(cm.total() == 12);
}

TEST_CASE("perfect diagonal gives F1 = 1 everywhere") {
    ConfusionMatrix cm;
    for (std::size_t c = 0; c < 3; ++c)
        for (int i = 0; i < 5; ++i) cm.record(c, c);
    for (double f : cm.f1_per_class()) CHECK(f == doctest::Approx(1.0));
    CHECK(cm.macro_f1() == doctest::Approx(1.0));
}

TEST_CASE("hand-evaluated F1: counts [[5,0],[2,3]]") {
    ConfusionMatrix cm;
    for (int i = 0; i < 5; ++i) cm.record(0, 0);
    for (int i = 0; i < 2; ++i) cm.record(0, 1);
    for (int i = 0; i < 3; ++i) cm.record(1, 1);
    auto f1 = cm.f1_per_class();
    CHECK(f1[0] == doctest::Approx(5.0 / 6.0));
    CHECK(f1[1] == doctest::Approx(3.0 / 4.0));
    CHECK(cm.macro_f1() == doctest::Approx(19.0 / 24.0));
}

TEST_CASE("never-seen class contributes F1 = 0 to the macro") {
    ConfusionMatrix cm(3);
    for (int i = 0; i < 4; ++i) cm.record(0, 0);
    for (int i = 0; i < 4; ++i) cm.record(1, 1);
    auto f1 = cm.f1_per_class();
    CHECK(f1[2] == 0.0);
    CHECK(cm.macro_f1() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("empty matrix has no defined F1") {
    ConfusionMatrix cm(2);
    CHECK_THROWS_AS(cm.macro_f1(), DomainError);
}

TEST_CASE("macro F1 is invariant under joint class relabeling") {
    Rng rng(7);
    ConfusionMatrix a, b;
    // permutation (0 1 2) -> (2 0 1)
    std::size_t perm[3] = {2, 0, 1};
    for (int i = 0; i < 500; ++i) {
        std::size_t p = rng.index(3), t = rng.index(3);
        a.record(p, t);
        b.record(perm[p], perm[t]);
    }
    CHECK(a.macro_f1() == doctest::Approx(b.macro_f1()).epsilon(1e-12));
}

TEST_CASE("f1 values always lie in [0,1]") {
    Rng rng(11);
    ConfusionMatrix cm;
    for (int i = 0; i < 1000; ++i) cm.record(rng.index(4), rng.index(4));
    for (double f : cm.f1_per_class()) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
    CHECK(cm.macro_f1() >= 0.0);
    CHECK(cm.macro_f1() <= 1.0);
}

TEST_CASE("mse accumulator: identical values land in one bin") {
    MseAccumulator acc(1.0, 50);
    for (int i = 0; i < 100; ++i) acc.record(0.37);
    std::uint64_t nonzero_bins = 0;
    for (std::size_t i = 0; i < acc.bin_count(); ++i)
        if (acc.bin(i) > 0) {
            ++nonzero_bins;
            CHECK(acc.bin(i) == 100);
            CHECK(acc.bin_lo(i) <= 0.37);
            CHECK(acc.bin_hi(i) > 0.37);
        }
    CHECK(nonzero_bins == 1);
}

TEST_CASE("mse accumulator mean matches direct recomputation") {
    Rng rng(3);
    MseAccumulator acc(2.0);
    double sum = 0.0;
    const int n = 5000;
    for (int i = 0; i < n; ++i) {
        double v = rng.uniform() * 3.0;  // some overflow past the last edge
        acc.record(v);
        sum += v;
    }
    CHECK(acc.mean() == doctest::Approx(sum / n).epsilon(1e-9));
    CHECK(acc.samples() == n);

    // conservation: every sample is in some bin, overflow included
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < acc.bin_count(); ++i) total += acc.bin(i);
    CHECK(total == n);
}

TEST_CASE("negative mse is rejected") {
    MseAccumulator acc(1.0);
    CHECK_THROWS_AS(acc.record(-0.1), DomainError);
}
