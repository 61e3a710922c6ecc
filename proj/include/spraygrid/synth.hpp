#pragma once

#include <array>
#include <cstdint>

#include <json.hpp>

#include "spraygrid/georaster.hpp"

namespace spraygrid {

// Per-band class spectra: crop and weed reflectance means plus a shared
// noise sigma. Not radiometrically physical, just enough contrast to
// exercise the regression and planning stages.
struct BandProfile {
    double crop_mean = 0.0;
    double weed_mean = 0.0;
    double sigma = 0.01;
};

std::array<BandProfile, 10> default_spectra();

// Synthetic field recipe. The satellite/drone pixel ratio must be an
// integer and the extent must tile both grids exactly.
struct FieldSpec {
    double extent_x_m = 100.0;
    double extent_y_m = 100.0;
    double drone_pixel_m = 0.05;
    double sat_pixel_m = 10.0;
    int weed_patch_count = 12;
    double patch_radius_min_m = 2.0;
    double patch_radius_max_m = 8.0;
    double target_weed_pct = 4.85; // of the field area
    std::array<BandProfile, 10> spectra = default_spectra();
    double prediction_snr = 4.0; // sd(truth) / sd(noise)
    std::uint64_t seed = 1;
    std::string crs = "synthetic-local";

    nlohmann::json to_json() const;
    static FieldSpec from_json(const nlohmann::json& j);
};

struct SynthField {
    GeoRaster drone_mask;    // u8 binary at drone resolution
    GeoRaster satellite;     // 10-band f32 on the satellite grid
    GeoRaster fraction_mask; // f32, block_fraction of the drone mask exactly
    GeoRaster prediction;    // truth fraction + seeded noise, clamped to [0,1]
};

// Paints random ellipse weed patches until the target weed fraction is met
// (within one point; the last patch shrinks by bisection to land there),
// then derives the satellite bands, the fraction target and a noisy
// prediction. Fully deterministic for a fixed seed: the same spec gives
// byte-identical rasters.
SynthField generate(const FieldSpec& spec);

} // namespace spraygrid
