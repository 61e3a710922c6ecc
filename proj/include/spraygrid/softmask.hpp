#pragma once

#include <cstdint>
#include <string>

#include "spraygrid/georaster.hpp"

namespace spraygrid {

constexpr double kSquareMetersPerAcre = 4046.8564224;

inline double acres_from_m2(double m2) { return m2 / kSquareMetersPerAcre; }

// Land/weed accounting in acres. weed_pct is weed_acres / total_land_acres
// as a percentage, exactly (up to float rounding).
struct AreaReport {
    double total_land_acres = 0.0;
    double weed_acres = 0.0;
    double weed_pct = 0.0;
};

// Aggregates a fine mask into per-block weed fractions. Input is a
// single-band raster whose values are either binary {0,1} (the 0/255 byte
// convention is normalized first) or already fractions in [0,1]; each output
// pixel is the mean over its factor x factor block, i.e. the fraction of
// weed-annotated area. Dimensions must divide evenly; the transform scales
// by the factor. A block containing any nodata yields nodata.
GeoRaster block_fraction(const GeoRaster& mask, int factor);

// Areas from a binary or fraction mask: weed area is sum(value) * pixel
// area; land area counts non-nodata pixels.
AreaReport area_report(const GeoRaster& mask);

enum class Split : std::uint8_t { Train = 0, Heldout = 1, Test = 2 };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct SplitFractions {
    double train = 0.45;
    double heldout = 0.25;
    double test = 0.30;
};

// Assigns contiguous block x block spatial tiles to train/heldout/test.
// Tiles are shuffled with the seed and handed out greedily against the
// target fractions (pixel-weighted), so realized fractions track targets
// within +/-2% whenever the grid holds a few dozen tiles. Deterministic for
// a fixed seed. Returns a u8 label raster on the given grid.
GeoRaster split_assign(int width, int height, const GeoTransform& transform,
                       const std::string& crs, const SplitFractions& fractions,
                       int block, std::uint64_t seed);

GeoRaster split_assign(const GeoRaster& ref, const SplitFractions& fractions,
                       int block, std::uint64_t seed);

} // namespace spraygrid
