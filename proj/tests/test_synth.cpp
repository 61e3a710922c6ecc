#include <doctest.h>

#include <cmath>

#include "spraygrid/composite.hpp"
#include "spraygrid/planner.hpp"
#include "spraygrid/softmask.hpp"
#include "spraygrid/synth.hpp"
#include "test_helpers.hpp"

using namespace spraygrid;

namespace {

FieldSpec small_spec(std::uint64_t seed) {
    FieldSpec spec;
    spec.extent_x_m = 100.0;
    spec.extent_y_m = 100.0;
    spec.drone_pixel_m = 0.25; // ratio 20, keeps the tests quick
    spec.sat_pixel_m = 5.0;
    spec.weed_patch_count = 10;
    spec.patch_radius_min_m = 3.0;
    spec.patch_radius_max_m = 9.0;
    spec.target_weed_pct = 6.0;
    spec.seed = seed;
    return spec;
}

} // namespace

TEST_CASE("zero patches produce an all-crop field") {
    FieldSpec spec = small_spec(1);
    spec.weed_patch_count = 0;
    spec.target_weed_pct = 0.0;
    const SynthField field = generate(spec);
    for (float v : field.drone_mask.data()) CHECK(v == 0.0f);
    for (float v : field.fraction_mask.data()) CHECK(v == 0.0f);
}

TEST_CASE("generation is deterministic per seed") {
    const SynthField a = generate(small_spec(7));
    const SynthField b = generate(small_spec(7));
    CHECK(a.drone_mask.data() == b.drone_mask.data());
    CHECK(a.satellite.data() == b.satellite.data());
    CHECK(a.fraction_mask.data() == b.fraction_mask.data());
    CHECK(a.prediction.data() == b.prediction.data());

    const SynthField c = generate(small_spec(8));
    CHECK(a.drone_mask.data() != c.drone_mask.data());
}

TEST_CASE("generated weed fraction lands within a point of the target") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const SynthField field = generate(small_spec(seed));
        const AreaReport area = area_report(field.fraction_mask);
        CHECK(std::fabs(area.weed_pct - 6.0) <= 1.0);
    }
}

TEST_CASE("the emitted fraction mask is exactly the drone-mask aggregation") {
    const FieldSpec spec = small_spec(11);
    const SynthField field = generate(spec);
    const GeoRaster recomputed = block_fraction(field.drone_mask, 20);
    CHECK(recomputed.data() == field.fraction_mask.data());
    CHECK(recomputed.transform().approx_equal(field.fraction_mask.transform(), 1e-12));
}

TEST_CASE("an infeasible target fraction is a generation error") {
    FieldSpec spec = small_spec(13);
    spec.weed_patch_count = 1;
    spec.patch_radius_min_m = 0.5;
    spec.patch_radius_max_m = 1.0; // one tiny patch cannot make 6%
    CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("non-integer grid ratios are rejected") {
    FieldSpec spec = small_spec(14);
    spec.drone_pixel_m = 0.29; // 5 / 0.29 is not an integer
    CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("raising the prediction SNR never hurts the spray plan") {
    for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
        FieldSpec lo = small_spec(seed), hi = small_spec(seed);
        lo.prediction_snr = 2.0;
        hi.prediction_snr = 8.0; // same noise draws, smaller amplitude
        const SynthField noisy = generate(lo);
        const SynthField clean = generate(hi);
        for (double target : {90.0, 99.0}) {
            const SprayPlan pn = make_plan(noisy.prediction, noisy.fraction_mask, target);
            const SprayPlan pc = make_plan(clean.prediction, clean.fraction_mask, target);
            CHECK(pc.excess_pct <= pn.excess_pct + 1e-9);
        }
    }
}

TEST_CASE("weed shows bright in the composite's red channel") {
    const SynthField field = generate(small_spec(31));
    const BandSet bands = BandSet::from_band_names(field.satellite.band_names());
    const GeoRaster rgb = false_color_composite(field.satellite, bands);

    double weed_r = 0, crop_r = 0;
    std::size_t weed_n = 0, crop_n = 0;
    for (std::size_t i = 0; i < field.fraction_mask.pixels(); ++i) {
        if (field.fraction_mask.data()[i] > 0.8) {
            weed_r += rgb.data()[i];
            ++weed_n;
        } else if (field.fraction_mask.data()[i] == 0.0f) {
            crop_r += rgb.data()[i];
            ++crop_n;
        }
    }
    REQUIRE(weed_n > 0);
    REQUIRE(crop_n > 0);
    CHECK(weed_r / weed_n > crop_r / crop_n + 50.0);
}
