#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "spraygrid/georaster.hpp"
#include "spraygrid/softmask.hpp"

namespace spraygrid {

// One point of the spray trade-off: spraying every pixel with prediction >=
// threshold covers weed_covered_fraction of the weed area using
// land_sprayed_m2 of land. Equal predictions enter or leave together.
struct CoveragePoint {
    float threshold = 0.0f;
    double weed_covered_fraction = 0.0; // of the total annotated weed area
    double land_sprayed_m2 = 0.0;
    std::size_t pixels = 0; // cumulative sprayed pixel count
};

struct CoverageCurve {
    std::vector<CoveragePoint> points; // thresholds strictly descending
    double total_weed_m2 = 0.0;        // all annotated weed, reachable or not
    double unreachable_weed_m2 = 0.0;  // weed under nodata predictions
    double total_land_m2 = 0.0;        // valid (plannable) land
    double pixel_area_m2 = 0.0;

    double max_coverage() const {
        return points.empty() ? 0.0 : points.back().weed_covered_fraction;
    }
};

// Single descending-sort pass over pixels valid in both rasters. truth may
// be binary or fractional; weed area at a threshold is the sum of truth
// fractions times pixel area over pixels at or above it. Pixels whose truth
// is nodata are excluded entirely; weed sitting where the prediction is
// nodata counts toward the total but can never be covered.
CoverageCurve coverage_curve(const GeoRaster& pred, const GeoRaster& truth);

// Largest threshold whose coverage meets the target: the least spraying that
// achieves it. Exact, never interpolated. Infeasible targets (beyond the
// curve's max coverage) are an error.
float select_threshold(const CoverageCurve& curve, double target_pct);

struct SprayPlan {
    double threshold = 0.0;
    double target_pct = 0.0;
    double achieved_pct = 0.0;
    double land_sprayed_acres = 0.0;
    double land_pct = 0.0;   // of the field's plannable land
    double weed_acres = 0.0; // total annotated weed area (the excess baseline)
    double excess_pct = 0.0; // (land_sprayed - weed) / weed * 100
    bool transfer = false;   // threshold came from another dataset
    bool met_target = true;  // achieved >= target (can fail in transfer mode)
    GeoRaster mask;          // u8, 1 = spray (prediction >= threshold)
};

// Excess spraying relative to an oracle that sprays exactly the weed area.
double excess_pct(double land_acres, double weed_acres);

// Same-data planning: selects the threshold on (pred, truth) itself.
SprayPlan make_plan(const GeoRaster& pred, const GeoRaster& truth, double target_pct);

// Transfer planning: applies a threshold chosen elsewhere (e.g. on held-out
// data); achieved coverage may fall below target and is reported as-is.
SprayPlan make_plan_transfer(const GeoRaster& pred, const GeoRaster& truth,
                             double target_pct, double threshold);

// One plan row per coverage target (defaults 90/95/98/99).
std::vector<SprayPlan> target_sweep(const GeoRaster& pred, const GeoRaster& truth,
                                    const std::vector<double>& targets = {90, 95, 98, 99});

nlohmann::json plan_to_json(const SprayPlan& plan);

// Aligned text table and CSV with columns Threshold, Weed %, Land %,
// Land Acres, Excess %.
std::string render_sweep_table(const std::vector<SprayPlan>& rows);
std::string sweep_csv(const std::vector<SprayPlan>& rows);

// Axis-aligned rectangle of sprayed pixels: rows x cols starting at
// (row, col). Greedy row-run decomposition for sprayer waypoints.
struct SprayRect {
    int row = 0, col = 0, rows = 0, cols = 0;
};

std::vector<SprayRect> mask_rectangles(const GeoRaster& mask);

nlohmann::json rects_to_json(const std::vector<SprayRect>& rects, const GeoTransform& tf);

// Writes mask.grf/.bin, plan.json and runs.json under dir.
void export_plan(const SprayPlan& plan, const std::filesystem::path& dir);

// Copies a raster keeping only pixels of one split label (others nodata), so
// threshold selection and evaluation can run on disjoint spatial subsets.
GeoRaster mask_by_split(const GeoRaster& raster, const GeoRaster& splits, Split keep);

} // namespace spraygrid
