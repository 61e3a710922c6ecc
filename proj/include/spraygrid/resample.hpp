#pragma once

#include <string>

#include "spraygrid/georaster.hpp"

namespace spraygrid {

enum class ResampleMethod { Nearest, Bilinear, BlockAverage };

ResampleMethod resample_method_from_name(const std::string& name);
const char* resample_method_name(ResampleMethod m);

// Resamples src onto the target grid (same CRS as src by contract; pass
// target_crs to assert it). Nearest/bilinear sample at output pixel centers;
// target pixels whose center falls outside the source extent become nodata
// (an alignment error if src defines none). Block-average requires an
// integer downscale ratio on an aligned grid and averages the covered source
// pixels; any nodata inside a block yields nodata.
GeoRaster resample(const GeoRaster& src, const GeoTransform& target, int width,
                   int height, ResampleMethod method,
                   const std::string& target_crs = std::string());

// Puts src onto ref's grid exactly. src must cover ref's extent within one
// src pixel; otherwise an alignment error reports the uncovered fraction.
// Sampling clamps at the source border inside that tolerance.
GeoRaster align(const GeoRaster& src, const GeoRaster& ref, ResampleMethod method);

// Convenience: block-average downscale by an integer factor.
GeoRaster downscale_block_average(const GeoRaster& src, int factor);

} // namespace spraygrid
