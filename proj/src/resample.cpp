#include "spraygrid/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace spraygrid {

namespace {

struct Extent {
    double x0, x1, y0, y1; // y0 = south edge, y1 = north edge
};

Extent raster_extent(const GeoRaster& r) {
    const GeoTransform& tf = r.transform();
    return {tf.origin_x, tf.origin_x + r.width() * tf.pixel_w,
            tf.origin_y - r.height() * tf.pixel_h, tf.origin_y};
}

bool near_integer(double v, double tol, long& out) {
    const double r = std::round(v);
    if (std::fabs(v - r) > tol) return false;
    out = static_cast<long>(r);
    return true;
}

// Nearest source index of a fractional pixel coordinate; halves round toward
// the higher index.
int nearest_index(double f, int n) {
    int i = static_cast<int>(std::floor(f + 0.5));
    return std::clamp(i, 0, n - 1);
}

GeoRaster block_average_impl(const GeoRaster& src, const GeoTransform& target, int width,
                             int height) {
    const GeoTransform& stf = src.transform();
    const double tol = 1e-9;
    long fx = 0, fy = 0, ox = 0, oy = 0;
    if (!near_integer(target.pixel_w / stf.pixel_w, tol, fx) ||
        !near_integer(target.pixel_h / stf.pixel_h, tol, fy) || fx < 1 || fy < 1)
        fail(ErrorKind::Parameter,
             "block-average requires an integer downscale ratio between the grids");
    if (!near_integer((target.origin_x - stf.origin_x) / stf.pixel_w, 1e-6, ox) ||
        !near_integer((stf.origin_y - target.origin_y) / stf.pixel_h, 1e-6, oy))
        fail(ErrorKind::Parameter,
             "block-average requires the target grid to sit on source pixel edges");
    if (ox < 0 || oy < 0 || ox + static_cast<long>(width) * fx > src.width() ||
        oy + static_cast<long>(height) * fy > src.height())
        fail(ErrorKind::Parameter, "block-average target grid is not covered by the source");

    GeoRaster out(width, height, src.bands(), DType::F32, target, src.crs(), src.nodata());
    out.set_band_names(src.band_names());
    for (int b = 0; b < src.bands(); ++b) {
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                double sum = 0.0;
                bool hole = false;
                for (long dr = 0; dr < fy && !hole; ++dr) {
                    const int sr = static_cast<int>(oy + r * fy + dr);
                    for (long dc = 0; dc < fx; ++dc) {
                        const int sc = static_cast<int>(ox + c * fx + dc);
                        const float v = src.at(b, sr, sc);
                        if (src.is_nodata(v)) { // any hole poisons the block
                            hole = true;
                            break;
                        }
                        sum += v;
                    }
                }
                out.at(b, r, c) = hole ? out.nodata_value()
                                       : static_cast<float>(sum / (double(fx) * double(fy)));
            }
        }
    }
    return out;
}

enum class Border { NodataOutside, Clamp };

GeoRaster sample_grid(const GeoRaster& src, const GeoTransform& target, int width, int height,
                      ResampleMethod method, Border border) {
    const GeoTransform& stf = src.transform();
    const Extent ext = raster_extent(src);
    const double ex = 1e-9 * stf.pixel_w, ey = 1e-9 * stf.pixel_h;

    GeoRaster out(width, height, src.bands(), src.dtype(), target, src.crs(), src.nodata());
    out.set_band_names(src.band_names());

    for (int r = 0; r < height; ++r) {
        const double y = target.pixel_center_y(r);
        const double rowf = stf.row_of_y(y);
        const bool y_inside = y >= ext.y0 - ey && y <= ext.y1 + ey;
        for (int c = 0; c < width; ++c) {
            const double x = target.pixel_center_x(c);
            const bool inside = y_inside && x >= ext.x0 - ex && x <= ext.x1 + ex;
            if (!inside && border == Border::NodataOutside) {
                if (!src.nodata())
                    fail(ErrorKind::Alignment,
                         "target grid extends outside the source extent and the source "
                         "defines no nodata value");
                for (int b = 0; b < src.bands(); ++b)
                    out.at(b, r, c) = out.nodata_value();
                continue;
            }
            const double colf = stf.col_of_x(x);
            if (method == ResampleMethod::Nearest) {
                const int sr = nearest_index(rowf, src.height());
                const int sc = nearest_index(colf, src.width());
                for (int b = 0; b < src.bands(); ++b) out.at(b, r, c) = src.at(b, sr, sc);
            } else { // bilinear
                const int c0 = static_cast<int>(std::floor(colf));
                const int r0 = static_cast<int>(std::floor(rowf));
                const double fx = colf - c0;
                const double fy = rowf - r0;
                const int cc0 = std::clamp(c0, 0, src.width() - 1);
                const int cc1 = std::clamp(c0 + 1, 0, src.width() - 1);
                const int rr0 = std::clamp(r0, 0, src.height() - 1);
                const int rr1 = std::clamp(r0 + 1, 0, src.height() - 1);
                const double w00 = (1.0 - fx) * (1.0 - fy), w10 = fx * (1.0 - fy);
                const double w01 = (1.0 - fx) * fy, w11 = fx * fy;
                for (int b = 0; b < src.bands(); ++b) {
                    const float v00 = src.at(b, rr0, cc0), v10 = src.at(b, rr0, cc1);
                    const float v01 = src.at(b, rr1, cc0), v11 = src.at(b, rr1, cc1);
                    bool hole = (w00 > 0 && src.is_nodata(v00)) ||
                                (w10 > 0 && src.is_nodata(v10)) ||
                                (w01 > 0 && src.is_nodata(v01)) ||
                                (w11 > 0 && src.is_nodata(v11));
                    if (hole) {
                        if (!src.nodata())
                            fail(ErrorKind::Validation, "bilinear hit an undefined value");
                        out.at(b, r, c) = out.nodata_value();
                    } else {
                        out.at(b, r, c) = static_cast<float>(w00 * v00 + w10 * v10 +
                                                             w01 * v01 + w11 * v11);
                    }
                }
            }
        }
    }
    return out;
}

} // namespace

ResampleMethod resample_method_from_name(const std::string& name) {
    if (name == "nearest") return ResampleMethod::Nearest;
    if (name == "bilinear") return ResampleMethod::Bilinear;
    if (name == "block-average" || name == "block_average") return ResampleMethod::BlockAverage;
    fail(ErrorKind::Parameter, "unknown resampling method '" + name + "'");
}

const char* resample_method_name(ResampleMethod m) {
    switch (m) {
        case ResampleMethod::Nearest: return "nearest";
        case ResampleMethod::Bilinear: return "bilinear";
        case ResampleMethod::BlockAverage: return "block-average";
    }
    return "?";
}

GeoRaster resample(const GeoRaster& src, const GeoTransform& target, int width, int height,
                   ResampleMethod method, const std::string& target_crs) {
    if (!target.valid()) fail(ErrorKind::Parameter, "target pixel sizes must be positive");
    if (width <= 0 || height <= 0) fail(ErrorKind::Parameter, "target dims must be positive");
    if (!target_crs.empty() && target_crs != src.crs())
        fail(ErrorKind::Alignment,
             "CRS mismatch: source is '" + src.crs() + "', target wants '" + target_crs + "'");
    if (method == ResampleMethod::BlockAverage)
        return block_average_impl(src, target, width, height);
    return sample_grid(src, target, width, height, method, Border::NodataOutside);
}

GeoRaster align(const GeoRaster& src, const GeoRaster& ref, ResampleMethod method) {
    if (src.crs() != ref.crs())
        fail(ErrorKind::Alignment,
             "CRS mismatch: source is '" + src.crs() + "', reference is '" + ref.crs() + "'");
    if (method == ResampleMethod::BlockAverage)
        return block_average_impl(src, ref.transform(), ref.width(), ref.height());

    const Extent s = raster_extent(src);
    const Extent r = raster_extent(ref);
    const double tx = src.transform().pixel_w, ty = src.transform().pixel_h;
    const bool covered = r.x0 >= s.x0 - tx && r.x1 <= s.x1 + tx && r.y0 >= s.y0 - ty &&
                         r.y1 <= s.y1 + ty;
    if (!covered) {
        const double ox = std::max(0.0, std::min(r.x1, s.x1) - std::max(r.x0, s.x0));
        const double oy = std::max(0.0, std::min(r.y1, s.y1) - std::max(r.y0, s.y0));
        const double uncovered = 1.0 - (ox * oy) / ((r.x1 - r.x0) * (r.y1 - r.y0));
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "source covers too little of the reference grid (%.2f%% uncovered)",
                      uncovered * 100.0);
        fail(ErrorKind::Alignment, buf);
    }
    return sample_grid(src, ref.transform(), ref.width(), ref.height(), method, Border::Clamp);
}

GeoRaster downscale_block_average(const GeoRaster& src, int factor) {
    if (factor < 1) fail(ErrorKind::Parameter, "downscale factor must be >= 1");
    if (src.width() % factor != 0 || src.height() % factor != 0)
        fail(ErrorKind::Parameter, "raster dims are not divisible by the downscale factor");
    return block_average_impl(src, src.transform().scaled(factor), src.width() / factor,
                              src.height() / factor);
}

} // namespace spraygrid
