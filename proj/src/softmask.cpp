#include "spraygrid/softmask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spraygrid/rng.hpp"

namespace spraygrid {

namespace {

// Accepts {0,1}, the {0,255} byte convention (normalized), or fractions in
// [0,1]. Returns values ready for block averaging.
std::vector<float> normalized_mask_values(const GeoRaster& mask) {
    bool byte_convention = false;
    for (float v : mask.data()) {
        if (mask.is_nodata(v)) continue;
        if (v == 255.0f) byte_convention = true;
    }
    std::vector<float> vals(mask.data());
    for (float& v : vals) {
        if (mask.is_nodata(v)) continue;
        if (byte_convention) {
            if (v == 0.0f || v == 255.0f)
                v = v == 255.0f ? 1.0f : 0.0f;
            else
                fail(ErrorKind::Validation,
                     "mask mixes the 0/255 byte convention with other values");
        } else if (v < 0.0f || v > 1.0f) {
            fail(ErrorKind::Validation, "mask values must be binary or fractions in [0,1]");
        }
    }
    return vals;
}

} // namespace

GeoRaster block_fraction(const GeoRaster& mask, int factor) {
    if (mask.bands() != 1)
        fail(ErrorKind::Parameter, "block_fraction expects a single-band mask");
    if (factor < 1) fail(ErrorKind::Parameter, "factor must be >= 1");
    if (mask.width() % factor != 0 || mask.height() % factor != 0)
        fail(ErrorKind::Parameter,
             "mask dims are not divisible by the aggregation factor; crop or pad explicitly");

    const std::vector<float> vals = normalized_mask_values(mask);
    const int ow = mask.width() / factor, oh = mask.height() / factor;
    const std::optional<double> nodata =
        mask.nodata() ? std::optional<double>(-1.0) : std::nullopt;
    GeoRaster out(ow, oh, 1, DType::F32, mask.transform().scaled(factor), mask.crs(), nodata);

    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
            double sum = 0.0;
            bool hole = false;
            for (int dr = 0; dr < factor && !hole; ++dr) {
                const std::size_t row_off =
                    static_cast<std::size_t>(r * factor + dr) * mask.width() +
                    static_cast<std::size_t>(c) * factor;
                for (int dc = 0; dc < factor; ++dc) {
                    const float v = vals[row_off + dc];
                    if (mask.is_nodata(v)) {
                        hole = true;
                        break;
                    }
                    sum += v;
                }
            }
            out.at(0, r, c) = hole ? out.nodata_value() : static_cast<float>(sum * inv);
        }
    }
    return out;
}

AreaReport area_report(const GeoRaster& mask) {
    if (mask.bands() != 1)
        fail(ErrorKind::Parameter, "area_report expects a single-band mask");
    if (!mask.transform().valid())
        fail(ErrorKind::Parameter, "raster has no usable pixel size");

    const std::vector<float> vals = normalized_mask_values(mask);
    const double pixel_area = mask.pixel_area();
    double weed_m2 = 0.0;
    std::size_t land_px = 0;
    for (float v : vals) {
        if (mask.is_nodata(v)) continue;
        ++land_px;
        weed_m2 += static_cast<double>(v) * pixel_area;
    }
    if (land_px == 0) fail(ErrorKind::Validation, "mask holds no valid pixels");

    AreaReport report;
    report.total_land_acres = acres_from_m2(static_cast<double>(land_px) * pixel_area);
    report.weed_acres = acres_from_m2(weed_m2);
    report.weed_pct = report.weed_acres / report.total_land_acres * 100.0;
    return report;
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Heldout: return "heldout";
        case Split::Test: return "test";
    }
    return "?";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "heldout") return Split::Heldout;
    if (name == "test") return Split::Test;
    fail(ErrorKind::Schema, "unknown split label '" + name + "'");
}

GeoRaster split_assign(int width, int height, const GeoTransform& transform,
                       const std::string& crs, const SplitFractions& fractions, int block,
                       std::uint64_t seed) {
    const double sum = fractions.train + fractions.heldout + fractions.test;
    if (fractions.train < 0 || fractions.heldout < 0 || fractions.test < 0 ||
        std::fabs(sum - 1.0) > 1e-9)
        fail(ErrorKind::Parameter, "split fractions must be non-negative and sum to 1");
    if (block < 1) fail(ErrorKind::Parameter, "split block must be >= 1");
    if (block > width || block > height)
        fail(ErrorKind::Parameter, "split block exceeds the grid");

    const int bx = (width + block - 1) / block;
    const int by = (height + block - 1) / block;
    std::vector<int> order(static_cast<std::size_t>(bx) * by);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, /*stream=*/7);
    rng.shuffle(order);

    const double target[3] = {fractions.train, fractions.heldout, fractions.test};
    double assigned[3] = {0.0, 0.0, 0.0};
    double assigned_total = 0.0;

    GeoRaster labels(width, height, 1, DType::U8, transform, crs);
    for (int tile : order) {
        const int tr = tile / bx, tc = tile % bx;
        const int r0 = tr * block, c0 = tc * block;
        const int rows = std::min(block, height - r0), cols = std::min(block, width - c0);
        const double px = static_cast<double>(rows) * cols;

        // hand the tile to the split lagging furthest behind its target
        int best = -1;
        double best_deficit = -1e300;
        for (int s = 0; s < 3; ++s) {
            if (target[s] <= 0.0) continue;
            const double deficit = target[s] * (assigned_total + px) - assigned[s];
            if (deficit > best_deficit + 1e-12) {
                best_deficit = deficit;
                best = s;
            }
        }
        assigned[best] += px;
        assigned_total += px;
        for (int r = r0; r < r0 + rows; ++r)
            for (int c = c0; c < c0 + cols; ++c) labels.at(0, r, c) = static_cast<float>(best);
    }
    return labels;
}

GeoRaster split_assign(const GeoRaster& ref, const SplitFractions& fractions, int block,
                       std::uint64_t seed) {
    return split_assign(ref.width(), ref.height(), ref.transform(), ref.crs(), fractions, block,
                        seed);
}

} // namespace spraygrid
