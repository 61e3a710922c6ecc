#pragma once

#include <array>
#include <optional>
#include <string>

#include "spraygrid/georaster.hpp"

namespace spraygrid {

// Per-band linear stretch bounds; lo < hi.
struct StretchBounds {
    double lo = 0.0;
    double hi = 1.0;
};

// Which band role feeds each output channel. The default reproduces the
// weed-contrast composite: R <- nir, G <- green, B <- vre2.
struct CompositeMapping {
    std::string r = "nir";
    std::string g = "green";
    std::string b = "vre2";
};

// Percentile of a band's non-nodata values, linearly interpolated between
// order statistics.
double band_percentile(const GeoRaster& raster, int band, double pct);

// Default stretch: the band's 2nd..98th percentile range.
StretchBounds percentile_stretch(const GeoRaster& raster, int band,
                                 double lo_pct = 2.0, double hi_pct = 98.0);

// 3-band u8 composite. Each channel is the source band stretched linearly to
// 0..255 and clamped; rounding is half-away-from-zero, so the midpoint of
// [lo,hi] maps to 128. Nodata pixels come out black in all channels.
GeoRaster false_color_composite(
    const GeoRaster& sat, const BandSet& bands,
    const CompositeMapping& mapping = CompositeMapping{},
    const std::optional<std::array<StretchBounds, 3>>& bounds = std::nullopt);

} // namespace spraygrid
