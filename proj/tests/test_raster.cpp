#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "spraygrid/composite.hpp"
#include "spraygrid/grf.hpp"
#include "spraygrid/png_io.hpp"
#include "spraygrid/resample.hpp"
#include "spraygrid/rng.hpp"
#include "test_helpers.hpp"

using namespace spraygrid;
using testutil::make_raster;
using testutil::slurp;
using testutil::TempDir;

TEST_CASE("geotransform pixel-center mapping round-trips") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        GeoTransform tf{rng.uniform(-5e5, 5e5), rng.uniform(-5e5, 5e5),
                        rng.uniform(0.01, 50.0), rng.uniform(0.01, 50.0)};
        const double col = rng.uniform(0, 5000), row = rng.uniform(0, 5000);
        CHECK(std::fabs(tf.col_of_x(tf.pixel_center_x(col)) - col) < 1e-9);
        CHECK(std::fabs(tf.row_of_y(tf.pixel_center_y(row)) - row) < 1e-9);
    }
}

TEST_CASE("GRF round-trip is byte-exact") {
    TempDir tmp("grf");
    GeoRaster r(7, 5, 3, DType::F32, {1000.0, 2000.0, 10.0, 10.0}, "EPSG:32614", -9999.0);
    Rng rng(3);
    for (auto& v : r.data()) v = static_cast<float>(rng.uniform(-2, 2));
    r.data()[5] = r.nodata_value();
    r.set_band_names({"a", "b", "c"});

    write_grf(r, tmp / "x.grf");
    const GeoRaster back = read_grf(tmp / "x.grf");
    CHECK(back.width() == 7);
    CHECK(back.bands() == 3);
    CHECK(back.crs() == "EPSG:32614");
    CHECK(back.nodata() == -9999.0);
    CHECK(back.band_names() == std::vector<std::string>{"a", "b", "c"});
    CHECK(back.data() == r.data());
    CHECK(back.transform().approx_equal(r.transform(), 1e-12));

    write_grf(back, tmp / "y.grf");
    CHECK(slurp(tmp / "x.grf") == slurp(tmp / "y.grf"));
    CHECK(slurp(tmp / "x.bin") == slurp(tmp / "y.bin"));

    SUBCASE("u8 dtype round-trips too") {
        GeoRaster m(4, 4, 1, DType::U8, {0, 4, 1, 1}, "local");
        for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = float(i % 2);
        write_grf(m, tmp / "m.grf");
        const GeoRaster mb = read_grf(tmp / "m.grf");
        CHECK(mb.dtype() == DType::U8);
        CHECK(mb.data() == m.data());
        write_grf(mb, tmp / "m2.grf");
        CHECK(slurp(tmp / "m.bin") == slurp(tmp / "m2.bin"));
    }

    SUBCASE("truncated payload is a schema error") {
        write_grf(r, tmp / "t.grf");
        std::filesystem::resize_file(tmp / "t.bin", 10);
        CHECK_THROWS_AS(read_grf(tmp / "t.grf"), Error);
    }

    SUBCASE("rotated geotransforms are rejected") {
        write_grf(r, tmp / "rot.grf");
        auto j = nlohmann::json::parse(slurp(tmp / "rot.grf"));
        j["transform"][2] = 0.5;
        std::ofstream(tmp / "rot.grf") << j.dump(2);
        CHECK_THROWS_AS(read_grf(tmp / "rot.grf"), Error);
    }
}

TEST_CASE("mask PNG honors the 0/255 convention") {
    TempDir tmp("png");
    GeoRaster mask = testutil::random_binary(31, 17, 0.4, 5, 0.05);
    write_mask_png(mask, tmp / "mask.png");
    const GeoRaster back = read_mask_png(tmp / "mask.png");
    CHECK(back.data() == mask.data()); // bytes 0/255 normalize back to {0,1}
    CHECK(back.transform().approx_equal(mask.transform(), 1e-9));
    CHECK(back.crs() == mask.crs());

    SUBCASE("non-binary raster refuses PNG export") {
        mask.data()[0] = 0.5f;
        CHECK_THROWS_AS(write_mask_png(mask, tmp / "bad.png"), Error);
    }
    SUBCASE("an RGB PNG is rejected as a mask") {
        GeoRaster rgb(4, 4, 3, DType::U8, {0, 4, 1, 1}, "local");
        write_rgb_png(rgb, tmp / "rgb.png");
        CHECK_THROWS_AS(read_mask_png(tmp / "rgb.png"), Error);
    }
}

TEST_CASE("nearest upsampling duplicates source pixels") {
    // a 20 m band resampled to 10 m: every pixel becomes a 2x2 block
    GeoRaster src = make_raster(2, 2, {1, 2, 3, 4}, 20.0, 0.0, 40.0);
    const GeoRaster out = resample(src, {0.0, 40.0, 10.0, 10.0}, 4, 4, ResampleMethod::Nearest);
    const std::vector<float> expect = {1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
    CHECK(out.data() == expect);
}

TEST_CASE("constant rasters stay constant under any resampling") {
    GeoRaster src = make_raster(8, 8, std::vector<float>(64, 3.25f), 10.0, 0.0, 80.0);
    for (ResampleMethod m :
         {ResampleMethod::Nearest, ResampleMethod::Bilinear, ResampleMethod::BlockAverage}) {
        const GeoRaster out = resample(src, {0.0, 80.0, 20.0, 20.0}, 4, 4, m);
        for (float v : out.data()) CHECK(v == 3.25f);
    }
}

TEST_CASE("block-average of 1..16 by 2 gives the block means") {
    std::vector<float> vals(16);
    for (int i = 0; i < 16; ++i) vals[i] = float(i + 1);
    GeoRaster src = make_raster(4, 4, vals, 1.0, 0.0, 4.0);
    const GeoRaster out = downscale_block_average(src, 2);
    CHECK(out.data() == std::vector<float>{3.5f, 5.5f, 11.5f, 13.5f});
    CHECK(out.transform().pixel_w == 2.0);

    SUBCASE("non-integer ratio is a parameter error") {
        CHECK_THROWS_AS(resample(src, {0.0, 4.0, 1.5, 1.5}, 2, 2, ResampleMethod::BlockAverage),
                        Error);
    }
    SUBCASE("nodata poisons its block") {
        src.set_nodata(-1.0);
        src.data()[0] = -1.0f;
        const GeoRaster o = downscale_block_average(src, 2);
        CHECK(o.is_nodata(o.at(0, 0, 0)));
        CHECK(o.at(0, 0, 1) == 5.5f);
    }
}

TEST_CASE("block-average conserves mass") {
    Rng rng(17);
    for (int rep = 0; rep < 25; ++rep) {
        const int factor = std::vector<int>{2, 4, 5}[rep % 3];
        const int w = factor * (2 + int(rng.below(6)));
        const int h = factor * (2 + int(rng.below(6)));
        std::vector<float> vals(std::size_t(w) * h);
        for (auto& v : vals) v = static_cast<float>(rng.uniform());
        GeoRaster src = make_raster(w, h, vals, 3.0, 0.0, h * 3.0);
        const GeoRaster out = downscale_block_average(src, factor);

        double in_mass = 0, out_mass = 0;
        for (float v : src.data()) in_mass += double(v) * src.pixel_area();
        for (float v : out.data()) out_mass += double(v) * out.pixel_area();
        CHECK(out_mass == doctest::Approx(in_mass).epsilon(1e-6));
    }
}

TEST_CASE("nearest output values come from the input value set") {
    Rng rng(23);
    GeoRaster src = make_raster(12, 9, {}, 5.0, 0.0, 45.0);
    src.data().resize(12 * 9);
    std::set<float> pool;
    for (auto& v : src.data()) {
        v = static_cast<float>(rng.uniform(0, 7));
        pool.insert(v);
    }
    const GeoRaster out =
        resample(src, {7.0, 38.0, 3.3, 2.9}, 10, 8, ResampleMethod::Nearest);
    for (float v : out.data()) CHECK(pool.count(v) == 1);
}

TEST_CASE("align puts a raster onto the reference grid") {
    Rng rng(31);
    std::vector<float> vals(30 * 30);
    for (auto& v : vals) v = static_cast<float>(rng.uniform());
    GeoRaster src = make_raster(30, 30, vals, 1.0, 0.0, 30.0);
    GeoRaster ref = make_raster(10, 10, std::vector<float>(100, 0.f), 2.0, 4.0, 26.0);

    SUBCASE("identity when src is already on the ref grid") {
        const GeoRaster out = align(src, src, ResampleMethod::Nearest);
        CHECK(out.data() == src.data());
        const GeoRaster outb = align(src, src, ResampleMethod::Bilinear);
        CHECK(outb.data() == src.data());
    }

    SUBCASE("hand-computed nearest alignment") {
        GeoRaster line = make_raster(7, 1, {10, 20, 30, 40, 50, 60, 70}, 1.0, 0.0, 1.0);
        GeoRaster grid(2, 1, 1, DType::F32, {0.0, 1.0, 3.0, 1.0}, "test-crs");
        // ref centers at x = 1.5 and 4.5 -> src columns 1 and 4
        const GeoRaster out = align(line, grid, ResampleMethod::Nearest);
        CHECK(out.data() == std::vector<float>{20, 50});
    }

    SUBCASE("2.9 cm mask onto the 5 cm grid picks the nearest drone pixel") {
        std::vector<float> cols(12);
        for (int i = 0; i < 12; ++i) cols[i] = float(i);
        GeoRaster drone(12, 1, 1, DType::F32, {0.0, 0.029, 0.029, 0.029}, "test-crs");
        drone.data() = cols;
        GeoRaster grid(6, 1, 1, DType::F32, {0.0, 0.05, 0.05, 0.05}, "test-crs");
        const GeoRaster out = align(drone, grid, ResampleMethod::Nearest);
        // centers at (c+0.5)*0.05 land on source columns 0,2,4,6,7,9
        CHECK(out.data() == std::vector<float>{0, 2, 4, 6, 7, 9});
    }

    SUBCASE("shifting src by whole ref pixels translates the output") {
        const int k = 2;
        const GeoRaster base = align(src, ref, ResampleMethod::Nearest);
        GeoRaster shifted = src;
        {
            GeoTransform tf = src.transform();
            tf.origin_x += k * ref.transform().pixel_w;
            shifted = GeoRaster(src.width(), src.height(), 1, src.dtype(), tf, src.crs());
            shifted.data() = src.data();
        }
        const GeoRaster moved = align(shifted, ref, ResampleMethod::Nearest);
        for (int r = 0; r < ref.height(); ++r)
            for (int c = k; c < ref.width(); ++c)
                CHECK(moved.at(0, r, c) == base.at(0, r, c - k));
    }

    SUBCASE("alignment is idempotent on the ref grid") {
        for (ResampleMethod m : {ResampleMethod::Nearest, ResampleMethod::Bilinear}) {
            const GeoRaster once = align(src, ref, m);
            const GeoRaster twice = align(once, ref, m);
            CHECK(once.data() == twice.data());
        }
    }

    SUBCASE("insufficient overlap reports the uncovered fraction") {
        GeoRaster far_ref = make_raster(10, 10, std::vector<float>(100, 0.f), 2.0, 100.0, 26.0);
        CHECK_THROWS_WITH_AS(align(src, far_ref, ResampleMethod::Nearest),
                             doctest::Contains("uncovered"), Error);
    }

    SUBCASE("CRS mismatch is an alignment error") {
        GeoRaster other = make_raster(10, 10, std::vector<float>(100, 0.f), 2.0, 4.0, 26.0,
                                      "other-crs");
        CHECK_THROWS_WITH_AS(align(src, other, ResampleMethod::Nearest),
                             doctest::Contains("CRS"), Error);
    }
}

namespace {

GeoRaster ten_band(int w, int h, std::uint64_t seed) {
    GeoRaster sat(w, h, 10, DType::F32, {0.0, double(h), 1.0, 1.0}, "test-crs");
    std::vector<std::string> names(BandSet::role_names().begin(), BandSet::role_names().end());
    sat.set_band_names(names);
    Rng rng(seed);
    for (auto& v : sat.data()) v = static_cast<float>(rng.uniform(0.0, 0.6));
    return sat;
}

} // namespace

TEST_CASE("false-color composite stretch endpoints and midpoint") {
    GeoRaster sat = ten_band(6, 4, 7);
    BandSet bands;
    const std::size_t px = sat.pixels();
    // nir constant at lo, green at hi, vre2 at the midpoint of [0.2, 0.6]
    for (std::size_t i = 0; i < px; ++i) {
        sat.data()[std::size_t(bands.nir) * px + i] = 0.2f;
        sat.data()[std::size_t(bands.green) * px + i] = 0.6f;
        sat.data()[std::size_t(bands.vre2) * px + i] = 0.4f;
    }
    std::array<StretchBounds, 3> bounds{{{0.2, 0.6}, {0.2, 0.6}, {0.2, 0.6}}};
    const GeoRaster rgb = false_color_composite(sat, bands, {}, bounds);
    CHECK(rgb.dtype() == DType::U8);
    CHECK(rgb.at(0, 0, 0) == 0.0f);    // R <- nir at lower bound
    CHECK(rgb.at(1, 1, 2) == 255.0f);  // G <- green at upper bound
    CHECK(rgb.at(2, 3, 5) == 128.0f);  // B <- vre2 at the midpoint, half-up

    SUBCASE("unknown band role is a parameter error") {
        CompositeMapping m;
        m.r = "thermal";
        CHECK_THROWS_AS(false_color_composite(sat, bands, m, bounds), Error);
    }
    SUBCASE("degenerate default stretch is a parameter error") {
        CHECK_THROWS_AS(false_color_composite(sat, bands, {}, std::nullopt), Error);
    }
}

TEST_CASE("composite is invariant under matched affine rescaling") {
    GeoRaster sat = ten_band(16, 12, 9);
    BandSet bands;
    const GeoRaster before = false_color_composite(sat, bands);

    // rescale the nir band by a power of two plus an exact offset; the
    // default percentile bounds rescale with the data
    const std::size_t px = sat.pixels();
    for (std::size_t i = 0; i < px; ++i) {
        float& v = sat.data()[std::size_t(bands.nir) * px + i];
        v = 2.0f * v + 0.5f;
    }
    const GeoRaster after = false_color_composite(sat, bands);
    CHECK(after.data() == before.data());
}
