#include <doctest.h>

#include <random>
#include <stdexcept>

#include "msgcn/evaluation.hpp"

using namespace msgcn;

namespace {

ChangeMap map_of(int w, int h, std::vector<uint8_t> labels) {
    ChangeMap m;
    m.width = w;
    m.height = h;
    m.labels = std::move(labels);
    return m;
}

}  // namespace

TEST_CASE("confusion counts") {
    const ChangeMap ref = map_of(4, 1, {1, 1, 0, 0});
    SUBCASE("perfect prediction") {
        const Confusion c = confusion(ref, ref);
        CHECK(c.fp == 0);
        CHECK(c.fn == 0);
        CHECK(c.tp == 2);
        CHECK(c.tn == 2);
    }
    SUBCASE("complement prediction") {
        const Confusion c = confusion(map_of(4, 1, {0, 0, 1, 1}), ref);
        CHECK(c.tp == 0);
        CHECK(c.tn == 0);
        CHECK(c.fp == 2);
        CHECK(c.fn == 2);
    }
    SUBCASE("hand case ref 1100 pred 1010") {
        const Confusion c = confusion(map_of(4, 1, {1, 0, 1, 0}), ref);
        CHECK(c.tp == 1);
        CHECK(c.fn == 1);
        CHECK(c.fp == 1);
        CHECK(c.tn == 1);
    }
    SUBCASE("size mismatch throws") {
        CHECK_THROWS_AS(confusion(map_of(3, 1, {0, 0, 0}), ref), std::runtime_error);
    }
}

TEST_CASE("metrics formulas") {
    SUBCASE("perfect classifier") {
        const MetricReport m = metrics({40, 0, 160, 0});
        CHECK(m.far == 0.0);
        CHECK(m.mar == 0.0);
        CHECK(m.oa == 1.0);
        CHECK(m.kappa == 1.0);
    }
    SUBCASE("all-unchanged prediction with 10% changed reference") {
        // tp=0, fp=0, tn=90, fn=10
        const MetricReport m = metrics({0, 0, 90, 10});
        CHECK(m.far == 0.0);
        CHECK(m.mar == 1.0);
        CHECK(m.oa == doctest::Approx(0.9));
        CHECK(m.kappa == doctest::Approx(0.0));
    }
    SUBCASE("hand evaluation tp=40 fn=10 fp=20 tn=130") {
        const MetricReport m = metrics({40, 20, 130, 10});
        CHECK(m.far == doctest::Approx(20.0 / 150.0).epsilon(1e-9));
        CHECK(m.mar == doctest::Approx(0.2).epsilon(1e-9));
        CHECK(m.oa == doctest::Approx(0.85).epsilon(1e-9));
        CHECK(m.kappa == doctest::Approx(0.625).epsilon(1e-9));
    }
    SUBCASE("empty confusion throws") {
        const Confusion empty{0, 0, 0, 0};
        CHECK_THROWS_AS(metrics(empty), std::runtime_error);
    }
    SUBCASE("single-class exact match guards kappa to 1") {
        const MetricReport m = metrics({0, 0, 100, 0});
        CHECK(m.oa == 1.0);
        CHECK(m.kappa == 1.0);
    }
}

TEST_CASE("OA = 1 iff fp = fn = 0") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        Confusion c{static_cast<int64_t>(rng() % 50), static_cast<int64_t>(rng() % 50),
                    static_cast<int64_t>(rng() % 50) + 1, static_cast<int64_t>(rng() % 50)};
        const MetricReport m = metrics(c);
        CHECK((m.oa == 1.0) == (c.fp == 0 && c.fn == 0));
    }
}

TEST_CASE("swapping predicted and reference keeps OA and kappa, swaps alarm rates") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<uint8_t> a(24), b(24);
        for (int i = 0; i < 24; ++i) {
            a[i] = rng() % 2;
            b[i] = rng() % 2;
        }
        const ChangeMap pa = map_of(6, 4, a), pb = map_of(6, 4, b);
        const Confusion fwd = confusion(pa, pb);
        const Confusion rev = confusion(pb, pa);
        const MetricReport mf = metrics(fwd);
        const MetricReport mr = metrics(rev);
        CHECK(mf.oa == doctest::Approx(mr.oa));
        CHECK(mf.kappa == doctest::Approx(mr.kappa));
        // Swapping turns FP into FN, so the reversed FAR equals FN/(FN+TP)
        // computed on the original confusion with its own denominator guard.
        const double expected_far =
            (fwd.fn + fwd.tn) > 0 ? static_cast<double>(fwd.fn) / (fwd.fn + fwd.tn) : 0.0;
        CHECK(mr.far == doctest::Approx(expected_far));
    }
}

TEST_CASE("report formatting") {
    const MetricReport m = metrics({40, 20, 130, 10});
    CHECK(metrics_csv_row(m) == "0.133333,0.200000,0.850000,0.625000");
    const std::string table = metrics_table(m);
    CHECK(table.find("13.33") != std::string::npos);
    CHECK(table.find("62.50") != std::string::npos);
}
