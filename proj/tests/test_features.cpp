#include <doctest.h>

#include <algorithm>
#include <random>

#include "msgcn/features.hpp"
#include "test_support.hpp"

using namespace msgcn;

namespace {

RasterPair make_pair(int w, int h, std::vector<double> v1, std::vector<double> v2) {
    Raster a{w, h, 1, std::move(v1)};
    Raster b{w, h, 1, std::move(v2)};
    return stack_pair(a, b);
}

SegmentationLevel level_from_labels(int w, int h, std::vector<int32_t> labels) {
    SegmentationLevel level;
    level.width = w;
    level.height = h;
    level.label_image = std::move(labels);
    const int n = *std::max_element(level.label_image.begin(), level.label_image.end()) + 1;
    level.parcels.resize(n);
    for (int i = 0; i < n; ++i) {
        level.parcels[i].id = i;
        level.parcels[i].area = static_cast<int>(
            std::count(level.label_image.begin(), level.label_image.end(), i));
    }
    return level;
}

}  // namespace

TEST_CASE("filter bank channel count: 5 per stacked band + 2 per band pair") {
    const RasterPair pair = make_pair(4, 4, std::vector<double>(16, 0.3),
                                      std::vector<double>(16, 0.6));
    const FeatureMaps maps = filter_bank_features(pair);
    CHECK(maps.channels == 12);
    CHECK(maps.width == 4);
    CHECK(maps.height == 4);
}

TEST_CASE("temporal difference channel marks exactly the changed pixels") {
    std::vector<double> v1(16, 0.3), v2(16, 0.3);
    v2[5] = 0.8;
    v2[6] = 0.8;
    const RasterPair pair = make_pair(4, 4, v1, v2);
    const FeatureMaps maps = filter_bank_features(pair);
    const int diff_ch = 10;  // first channel after the two per-band groups
    for (int i = 0; i < 16; ++i) {
        const double v = maps.at(diff_ch, i / 4, i % 4);
        if (i == 5 || i == 6) CHECK(v == doctest::Approx(1.0));
        else CHECK(v == doctest::Approx(0.0));
    }
}

TEST_CASE("constant image: derivative channels are zero, smooth channels constant") {
    const RasterPair pair = make_pair(5, 5, std::vector<double>(25, 0.4),
                                      std::vector<double>(25, 0.4));
    const FeatureMaps maps = filter_bank_features(pair);
    for (int band = 0; band < 2; ++band) {
        for (int ch_in_band = 0; ch_in_band < 5; ++ch_in_band) {
            const int ch = band * 5 + ch_in_band;
            const double first = maps.at(ch, 0, 0);
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) CHECK(maps.at(ch, r, c) == doctest::Approx(first));
        }
        // gradient magnitude of a constant is exactly zero; the local std
        // carries at most one rounding step from the windowed mean
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) {
                CHECK(maps.at(band * 5 + 3, r, c) == 0.0);
                CHECK(std::abs(maps.at(band * 5 + 4, r, c)) < 1e-15);
            }
    }
}

TEST_CASE("step edge: gradient channel is maximal exactly on the edge columns") {
    // 4x4 with a step between columns 1 and 2. Central differences put the
    // peak response on both columns adjacent to the step.
    std::vector<double> v(16, 0.0);
    for (int r = 0; r < 4; ++r)
        for (int c = 2; c < 4; ++c) v[static_cast<size_t>(r) * 4 + c] = 1.0;
    const RasterPair pair = make_pair(4, 4, v, v);
    const FeatureMaps maps = filter_bank_features(pair);
    const int grad_ch = 3;
    for (int r = 0; r < 4; ++r) {
        CHECK(maps.at(grad_ch, r, 1) == doctest::Approx(1.0));
        CHECK(maps.at(grad_ch, r, 2) == doctest::Approx(1.0));
        CHECK(maps.at(grad_ch, r, 0) == doctest::Approx(0.0));
        CHECK(maps.at(grad_ch, r, 3) == doctest::Approx(0.0));
    }
}

TEST_CASE("pool_object_features") {
    FeatureMaps maps;
    maps.channels = 2;
    maps.width = 2;
    maps.height = 1;
    maps.data = {2.0, 4.0,   // channel 0
                 7.0, 7.0};  // channel 1 constant

    SUBCASE("parcel covering values {2,4} pools to 3; constant channel to 7") {
        const SegmentationLevel level = level_from_labels(2, 1, {0, 0});
        const Matrix f = pool_object_features(maps, level);
        CHECK(f(0, 0) == doctest::Approx(3.0));
        CHECK(f(0, 1) == doctest::Approx(7.0));
    }
    SUBCASE("single-pixel parcels pool to the pixel values") {
        const SegmentationLevel level = level_from_labels(2, 1, {0, 1});
        const Matrix f = pool_object_features(maps, level);
        CHECK(f(0, 0) == 2.0);
        CHECK(f(1, 0) == 4.0);
        CHECK(f(0, 1) == 7.0);
        CHECK(f(1, 1) == 7.0);
    }
    SUBCASE("dimension mismatch throws") {
        const SegmentationLevel level = level_from_labels(3, 1, {0, 0, 0});
        CHECK_THROWS_AS(pool_object_features(maps, level), std::runtime_error);
    }
}

TEST_CASE("pooling stays within the channel's bounds and is permutation-invariant") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.25, 0.75);
    FeatureMaps maps;
    maps.channels = 3;
    maps.width = 4;
    maps.height = 4;
    maps.data.resize(48);
    for (double& v : maps.data) v = unif(rng);

    std::vector<int32_t> labels(16);
    for (int i = 0; i < 16; ++i) labels[i] = i % 3;
    const SegmentationLevel level = level_from_labels(4, 4, labels);
    const Matrix f = pool_object_features(maps, level);
    for (double v : f.d) {
        CHECK(v >= 0.25);
        CHECK(v <= 0.75);
    }

    // Permuting parcel ids permutes the pooled rows identically.
    std::vector<int32_t> permuted(16);
    const int perm[3] = {2, 0, 1};
    for (int i = 0; i < 16; ++i) permuted[i] = perm[labels[i]];
    const Matrix g = pool_object_features(maps, level_from_labels(4, 4, permuted));
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) CHECK(g(perm[i], c) == doctest::Approx(f(i, c)));
}
