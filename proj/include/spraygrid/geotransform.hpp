#pragma once

#include <cmath>

namespace spraygrid {

// Georeferencing for an axis-aligned grid. The origin is the outer top-left
// corner of pixel (0,0); pixel_h is stored positive and the row axis points
// south. No rotation or shear terms. All coordinate mapping uses the
// pixel-center convention: pixel (col,row) has its center at
//   x = origin_x + (col + 0.5) * pixel_w
//   y = origin_y - (row + 0.5) * pixel_h
struct GeoTransform {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_w = 1.0; // ground units per pixel, > 0
    double pixel_h = 1.0; // ground units per pixel, > 0

    bool valid() const { return pixel_w > 0.0 && pixel_h > 0.0; }

    double pixel_center_x(double col) const { return origin_x + (col + 0.5) * pixel_w; }
    double pixel_center_y(double row) const { return origin_y - (row + 0.5) * pixel_h; }

    // Fractional pixel coordinates of a ground point; integral exactly on centers.
    double col_of_x(double x) const { return (x - origin_x) / pixel_w - 0.5; }
    double row_of_y(double y) const { return (origin_y - y) / pixel_h - 0.5; }

    // Same origin, pixel size multiplied by an integer factor.
    GeoTransform scaled(int factor) const {
        return {origin_x, origin_y, pixel_w * factor, pixel_h * factor};
    }

    bool approx_equal(const GeoTransform& o, double tol = 1e-6) const {
        const double s = pixel_w;
        return std::fabs(origin_x - o.origin_x) <= tol * s &&
               std::fabs(origin_y - o.origin_y) <= tol * s &&
               std::fabs(pixel_w - o.pixel_w) <= tol * s &&
               std::fabs(pixel_h - o.pixel_h) <= tol * s;
    }
};

} // namespace spraygrid
