#include <doctest.h>

#include <cmath>

#include "spraygrid/softmask.hpp"
#include "test_helpers.hpp"

using namespace spraygrid;
using testutil::make_raster;
using testutil::random_binary;

TEST_CASE("block_fraction saturates and empties correctly") {
    GeoRaster all_weed = make_raster(200, 200, std::vector<float>(40000, 1.0f), 0.05, 0, 10);
    CHECK(block_fraction(all_weed, 200).at(0, 0, 0) == 1.0f);

    GeoRaster all_crop = make_raster(200, 200, std::vector<float>(40000, 0.0f), 0.05, 0, 10);
    CHECK(block_fraction(all_crop, 200).at(0, 0, 0) == 0.0f);
}

TEST_CASE("block_fraction matches a per-pixel counting oracle") {
    // the production-scale ratio: 200x200 drone pixels per satellite pixel
    GeoRaster mask = random_binary(400, 200, 0.13, 99, 0.05);
    const GeoRaster frac = block_fraction(mask, 200);
    CHECK(frac.width() == 2);
    CHECK(frac.height() == 1);
    CHECK(frac.transform().pixel_w == doctest::Approx(10.0));

    for (int bc = 0; bc < 2; ++bc) {
        long count = 0; // independent brute-force count
        for (int r = 0; r < 200; ++r)
            for (int c = 0; c < 200; ++c)
                if (mask.at(0, r, bc * 200 + c) == 1.0f) ++count;
        CHECK(frac.at(0, 0, bc) == float(count / 40000.0));
    }
}

TEST_CASE("block_fraction rejects bad inputs") {
    GeoRaster mask = random_binary(30, 30, 0.5, 1);
    CHECK_THROWS_AS(block_fraction(mask, 7), Error); // 30 % 7 != 0
    mask.data()[4] = 1.5f;                           // neither binary nor a fraction
    CHECK_THROWS_AS(block_fraction(mask, 3), Error);
}

TEST_CASE("block_fraction accepts the 0/255 byte convention") {
    GeoRaster mask = make_raster(4, 4, {0, 255, 255, 0, 0, 0, 255, 255, 0, 0, 0, 0, 255, 255,
                                        255, 255},
                                 1.0, 0, 4);
    const GeoRaster frac = block_fraction(mask, 2);
    CHECK(frac.data() == std::vector<float>{0.25f, 0.75f, 0.5f, 0.5f});

    SUBCASE("mixing 255 with other non-binary values fails") {
        mask.data()[0] = 3.0f;
        CHECK_THROWS_AS(block_fraction(mask, 2), Error);
    }
}

TEST_CASE("block_fraction composes over factors on dyadic data") {
    Rng rng(4);
    for (int rep = 0; rep < 10; ++rep) {
        const int a = 2 + int(rng.below(3)), b = 2 + int(rng.below(3));
        const int w = a * b * (1 + int(rng.below(3)));
        const int h = a * b * (1 + int(rng.below(2)));
        GeoRaster mask = random_binary(w, h, 0.4, 1000 + rep);
        const GeoRaster two_step = block_fraction(block_fraction(mask, a), b);
        const GeoRaster one_step = block_fraction(mask, a * b);
        for (std::size_t i = 0; i < one_step.size(); ++i)
            CHECK(two_step.data()[i] ==
                  doctest::Approx(one_step.data()[i]).epsilon(1e-6));
    }
}

TEST_CASE("weed area is conserved by block aggregation") {
    Rng rng(5);
    for (int rep = 0; rep < 40; ++rep) {
        const int factor = std::vector<int>{2, 4, 8, 10}[rep % 4];
        const int w = factor * (1 + int(rng.below(8)));
        const int h = factor * (1 + int(rng.below(8)));
        GeoRaster mask = random_binary(w, h, rng.uniform(0.05, 0.9), 2000 + rep, 0.05);
        const double before = area_report(mask).weed_acres;
        const double after = area_report(block_fraction(mask, factor)).weed_acres;
        if (before > 0) CHECK(after == doctest::Approx(before).epsilon(1e-6));
    }
}

TEST_CASE("area_report unit arithmetic") {
    SUBCASE("one 10 m pixel at fraction 0.5 is 50 m^2") {
        GeoRaster px = make_raster(1, 1, {0.5f}, 10.0, 0, 10);
        const AreaReport a = area_report(px);
        CHECK(a.weed_acres == doctest::Approx(0.0123553).epsilon(1e-4));
        CHECK(a.total_land_acres == doctest::Approx(100.0 / 4046.8564224));
        CHECK(a.weed_pct == doctest::Approx(50.0));
    }
    SUBCASE("2.45 weed acres on 50 acres is 4.9%") {
        // 50 acres at 10 m pixels: 2023.42821... pixels; use 45x45 = 2025 px
        // (50.03 acres) and scale fractions to hit 2.45 acres of weed
        const int n = 45;
        GeoRaster fm = make_raster(n, n, std::vector<float>(n * n, 0.0f), 10.0, 0, n * 10.0);
        const double total_acres = n * n * 100.0 / kSquareMetersPerAcre;
        const double want_frac = 2.45 / total_acres;
        for (auto& v : fm.data()) v = static_cast<float>(want_frac);
        const AreaReport a = area_report(fm);
        CHECK(a.weed_acres == doctest::Approx(2.45).epsilon(1e-6));
        CHECK(a.weed_pct == doctest::Approx(2.45 / total_acres * 100.0).epsilon(1e-6));
        CHECK(a.weed_pct == doctest::Approx(4.9).epsilon(0.01));
    }
    SUBCASE("all-zero mask reports zero weed") {
        GeoRaster fm = make_raster(8, 8, std::vector<float>(64, 0.0f), 10.0, 0, 80);
        const AreaReport a = area_report(fm);
        CHECK(a.weed_acres == 0.0);
        CHECK(a.weed_pct == 0.0);
    }
    SUBCASE("area_report is linear in the fractions") {
        Rng rng(6);
        GeoRaster fm = make_raster(12, 12, {}, 10.0, 0, 120);
        fm.data().resize(144);
        for (auto& v : fm.data()) v = static_cast<float>(rng.uniform(0.0, 0.5));
        const double base = area_report(fm).weed_acres;
        for (auto& v : fm.data()) v *= 2.0f;
        CHECK(area_report(fm).weed_acres == doctest::Approx(2 * base).epsilon(1e-9));
    }
    SUBCASE("degenerate pixel size is a parameter error") {
        CHECK_THROWS_AS(make_raster(2, 2, {0, 0, 0, 0}, 0.0, 0, 1), Error);
    }
}

TEST_CASE("split_assign covers the grid deterministically") {
    SUBCASE("degenerate split puts everything in train") {
        const GeoRaster s = split_assign(10, 10, {0, 10, 1, 1}, "c", {1, 0, 0}, 2, 7);
        for (float v : s.data()) CHECK(v == 0.0f);
    }

    SUBCASE("45/25/30 on a 100x100 grid with block 10") {
        const GeoRaster s =
            split_assign(100, 100, {0, 100, 1, 1}, "c", {0.45, 0.25, 0.30}, 10, 13);
        std::array<int, 3> tiles{0, 0, 0};
        for (int tr = 0; tr < 10; ++tr)
            for (int tc = 0; tc < 10; ++tc) {
                const float v = s.at(0, tr * 10, tc * 10);
                // whole tile carries one label
                for (int r = 0; r < 10; ++r)
                    for (int c = 0; c < 10; ++c)
                        REQUIRE(s.at(0, tr * 10 + r, tc * 10 + c) == v);
                ++tiles[int(v)];
            }
        CHECK(std::abs(tiles[0] - 45) <= 2);
        CHECK(std::abs(tiles[1] - 25) <= 2);
        CHECK(std::abs(tiles[2] - 30) <= 2);
    }

    SUBCASE("same seed reproduces the assignment") {
        const GeoRaster a = split_assign(64, 48, {0, 48, 1, 1}, "c", {}, 4, 99);
        const GeoRaster b = split_assign(64, 48, {0, 48, 1, 1}, "c", {}, 4, 99);
        CHECK(a.data() == b.data());
    }

    SUBCASE("realized fractions stay within 2 points of the targets") {
        Rng rng(8);
        for (int rep = 0; rep < 20; ++rep) {
            double f1 = rng.uniform(0.2, 0.6);
            double f2 = rng.uniform(0.1, (1.0 - f1) - 0.1);
            const SplitFractions f{f1, f2, 1.0 - f1 - f2};
            const int w = 40 + int(rng.below(80)), h = 40 + int(rng.below(80));
            const int block = 1 + int(rng.below(6));
            const GeoRaster s = split_assign(w, h, {0, double(h), 1, 1}, "c", f, block, rep);
            std::array<double, 3> counts{0, 0, 0};
            for (float v : s.data()) counts[int(v)] += 1.0;
            const double total = double(w) * h;
            CHECK(std::fabs(counts[0] / total - f.train) <= 0.02);
            CHECK(std::fabs(counts[1] / total - f.heldout) <= 0.02);
            CHECK(std::fabs(counts[2] / total - f.test) <= 0.02);
        }
    }

    SUBCASE("block larger than the grid is a parameter error") {
        CHECK_THROWS_AS(split_assign(10, 10, {0, 10, 1, 1}, "c", {}, 11, 1), Error);
    }
}
