#include "spraygrid/composite.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spraygrid {

double band_percentile(const GeoRaster& raster, int band, double pct) {
    if (band < 0 || band >= raster.bands())
        fail(ErrorKind::Parameter, "band index out of range");
    if (pct < 0.0 || pct > 100.0)
        fail(ErrorKind::Parameter, "percentile must be in [0,100]");
    std::vector<float> vals;
    vals.reserve(raster.pixels());
    const std::size_t off = static_cast<std::size_t>(band) * raster.pixels();
    for (std::size_t i = 0; i < raster.pixels(); ++i) {
        const float v = raster.data()[off + i];
        if (!raster.is_nodata(v)) vals.push_back(v);
    }
    if (vals.empty()) fail(ErrorKind::Validation, "band holds no valid values");
    std::sort(vals.begin(), vals.end());
    const double rank = pct / 100.0 * static_cast<double>(vals.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, vals.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return (1.0 - frac) * vals[lo] + frac * vals[hi];
}

StretchBounds percentile_stretch(const GeoRaster& raster, int band, double lo_pct,
                                 double hi_pct) {
    StretchBounds b{band_percentile(raster, band, lo_pct), band_percentile(raster, band, hi_pct)};
    if (!(b.lo < b.hi))
        fail(ErrorKind::Parameter, "degenerate stretch bounds (band nearly constant); "
                                   "pass explicit bounds");
    return b;
}

GeoRaster false_color_composite(const GeoRaster& sat, const BandSet& bands,
                                const CompositeMapping& mapping,
                                const std::optional<std::array<StretchBounds, 3>>& bounds) {
    bands.validate(sat.bands());
    const std::array<int, 3> src_bands = {bands.index_of(mapping.r), bands.index_of(mapping.g),
                                          bands.index_of(mapping.b)};
    std::array<StretchBounds, 3> sb;
    if (bounds) {
        sb = *bounds;
        for (const auto& b : sb)
            if (!(b.lo < b.hi)) fail(ErrorKind::Parameter, "stretch bounds need lo < hi");
    } else {
        for (int ch = 0; ch < 3; ++ch) sb[ch] = percentile_stretch(sat, src_bands[ch]);
    }

    GeoRaster out(sat.width(), sat.height(), 3, DType::U8, sat.transform(), sat.crs());
    out.set_band_names({"red", "green", "blue"});
    const std::size_t px = sat.pixels();
    for (int ch = 0; ch < 3; ++ch) {
        const std::size_t src_off = static_cast<std::size_t>(src_bands[ch]) * px;
        const std::size_t dst_off = static_cast<std::size_t>(ch) * px;
        const double lo = sb[ch].lo, inv = 255.0 / (sb[ch].hi - sb[ch].lo);
        for (std::size_t i = 0; i < px; ++i) {
            const float v = sat.data()[src_off + i];
            if (sat.is_nodata(v)) {
                out.data()[dst_off + i] = 0.0f;
                continue;
            }
            // half-away-from-zero rounding: the [lo,hi] midpoint maps to 128
            const double s = (static_cast<double>(v) - lo) * inv;
            const double q = std::round(s);
            out.data()[dst_off + i] = static_cast<float>(std::clamp(q, 0.0, 255.0));
        }
    }
    return out;
}

} // namespace spraygrid
