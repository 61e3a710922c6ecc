#pragma once

#include <filesystem>

#include "spraygrid/georaster.hpp"

namespace spraygrid {

// GRF raster container: a JSON sidecar ("x.grf") describing the grid plus a
// little-endian band-sequential flat binary ("x.bin") next to it.
//
// Sidecar schema:
//   {width, height, bands, dtype, transform: [origin_x, pixel_w, 0,
//    origin_y, 0, -pixel_h], crs, nodata, band_names[]}
//
// Round-trips are byte-exact for both dtypes.
GeoRaster read_grf(const std::filesystem::path& sidecar_path);
void write_grf(const GeoRaster& raster, const std::filesystem::path& sidecar_path);

// Path of the flat binary belonging to a sidecar.
std::filesystem::path grf_bin_path(const std::filesystem::path& sidecar_path);

// Reads either container by extension: .grf or .png (single-band mask).
GeoRaster read_raster(const std::filesystem::path& path);

} // namespace spraygrid
