#pragma once

#include <filesystem>

#include "spraygrid/georaster.hpp"

namespace spraygrid {

// 8-bit PNG exchange for masks and composites. Georeferencing travels in a
// JSON sidecar at "<path>.json" with the same transform/crs fields as GRF.
//
// Masks use the 0 = crop, 255 = weed byte convention on disk; in memory the
// pipeline works with {0,1}, so the loader normalizes and the writer expands.

// Single-band 8-bit grayscale PNG; values other than 0/255 are rejected.
GeoRaster read_mask_png(const std::filesystem::path& png_path);
void write_mask_png(const GeoRaster& mask, const std::filesystem::path& png_path);

// 3-band u8 raster (a composite) as an RGB PNG.
void write_rgb_png(const GeoRaster& rgb, const std::filesystem::path& png_path);

} // namespace spraygrid
