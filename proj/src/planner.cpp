#include "spraygrid/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spraygrid/grf.hpp"

namespace spraygrid {

using nlohmann::json;

namespace {

void check_plan_inputs(const GeoRaster& pred, const GeoRaster& truth) {
    if (pred.bands() != 1 || truth.bands() != 1)
        fail(ErrorKind::Parameter, "planning expects single-band rasters");
    if (!pred.same_grid(truth))
        fail(ErrorKind::Alignment, "prediction and truth rasters are not on the same grid");
}

} // namespace

CoverageCurve coverage_curve(const GeoRaster& pred, const GeoRaster& truth) {
    check_plan_inputs(pred, truth);

    CoverageCurve curve;
    curve.pixel_area_m2 = pred.pixel_area();

    // (prediction, truth fraction) over pixels valid in both rasters
    std::vector<std::pair<float, float>> px;
    px.reserve(pred.pixels());
    for (std::size_t i = 0; i < pred.pixels(); ++i) {
        const float t = truth.data()[i];
        if (truth.is_nodata(t)) continue; // unknown annotation: not plannable
        if (t < 0.0f || t > 1.0f)
            fail(ErrorKind::Validation, "truth mask values must lie in [0,1]");
        const float p = pred.data()[i];
        if (pred.is_nodata(p)) {
            // annotated weed the model can never reach
            curve.unreachable_weed_m2 += double(t) * curve.pixel_area_m2;
            curve.total_weed_m2 += double(t) * curve.pixel_area_m2;
            continue;
        }
        curve.total_weed_m2 += double(t) * curve.pixel_area_m2;
        curve.total_land_m2 += curve.pixel_area_m2;
        px.emplace_back(p, t);
    }

    if (curve.total_weed_m2 <= 0.0)
        fail(ErrorKind::Validation, "truth holds no weed; coverage is undefined");

    std::sort(px.begin(), px.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    // one pass over descending predictions; equal values collapse to one point
    double weed_acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < px.size();) {
        const float threshold = px[i].first;
        while (i < px.size() && px[i].first == threshold) {
            weed_acc += double(px[i].second) * curve.pixel_area_m2;
            ++count;
            ++i;
        }
        CoveragePoint point;
        point.threshold = threshold;
        point.weed_covered_fraction = weed_acc / curve.total_weed_m2;
        point.land_sprayed_m2 = static_cast<double>(count) * curve.pixel_area_m2;
        point.pixels = count;
        curve.points.push_back(point);
    }
    return curve;
}

float select_threshold(const CoverageCurve& curve, double target_pct) {
    if (!(target_pct > 0.0 && target_pct <= 100.0))
        fail(ErrorKind::Parameter, "coverage target must be in (0,100]");
    const double target = target_pct / 100.0;
    for (const CoveragePoint& p : curve.points)
        if (p.weed_covered_fraction >= target) return p.threshold;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "coverage target %.4g%% is unreachable: %.4g%% of the weed area lies under "
                  "nodata predictions",
                  target_pct, curve.unreachable_weed_m2 / curve.total_weed_m2 * 100.0);
    fail(ErrorKind::Infeasible, buf);
}

double excess_pct(double land_acres, double weed_acres) {
    if (weed_acres <= 0.0)
        fail(ErrorKind::Validation, "excess is undefined without weed area");
    return (land_acres - weed_acres) / weed_acres * 100.0;
}

namespace {

SprayPlan build_plan(const GeoRaster& pred, const GeoRaster& truth,
                     const CoverageCurve& curve, double target_pct, double threshold,
                     bool transfer) {
    SprayPlan plan;
    plan.threshold = threshold;
    plan.target_pct = target_pct;
    plan.transfer = transfer;

    GeoRaster mask(pred.width(), pred.height(), 1, DType::U8, pred.transform(), pred.crs());
    double covered_m2 = 0.0;
    std::size_t sprayed = 0;
    for (int r = 0; r < pred.height(); ++r) {
        for (int c = 0; c < pred.width(); ++c) {
            const float t = truth.at(0, r, c);
            if (truth.is_nodata(t)) continue;
            const float p = pred.at(0, r, c);
            if (pred.is_nodata(p)) continue;
            if (static_cast<double>(p) >= threshold) {
                mask.at(0, r, c) = 1.0f;
                covered_m2 += double(t) * curve.pixel_area_m2;
                ++sprayed;
            }
        }
    }

    plan.mask = std::move(mask);
    plan.achieved_pct = covered_m2 / curve.total_weed_m2 * 100.0;
    plan.met_target = plan.achieved_pct >= target_pct - 1e-9;
    plan.land_sprayed_acres = acres_from_m2(static_cast<double>(sprayed) * curve.pixel_area_m2);
    plan.land_pct = curve.total_land_m2 > 0.0
                        ? static_cast<double>(sprayed) * curve.pixel_area_m2 /
                              curve.total_land_m2 * 100.0
                        : 0.0;
    plan.weed_acres = acres_from_m2(curve.total_weed_m2);
    plan.excess_pct = excess_pct(plan.land_sprayed_acres, plan.weed_acres);
    return plan;
}

} // namespace

SprayPlan make_plan(const GeoRaster& pred, const GeoRaster& truth, double target_pct) {
    const CoverageCurve curve = coverage_curve(pred, truth);
    const float threshold = select_threshold(curve, target_pct);
    return build_plan(pred, truth, curve, target_pct, threshold, /*transfer=*/false);
}

SprayPlan make_plan_transfer(const GeoRaster& pred, const GeoRaster& truth, double target_pct,
                             double threshold) {
    const CoverageCurve curve = coverage_curve(pred, truth);
    return build_plan(pred, truth, curve, target_pct, threshold, /*transfer=*/true);
}

std::vector<SprayPlan> target_sweep(const GeoRaster& pred, const GeoRaster& truth,
                                    const std::vector<double>& targets) {
    if (targets.empty()) fail(ErrorKind::Parameter, "sweep needs at least one target");
    const CoverageCurve curve = coverage_curve(pred, truth);
    std::vector<SprayPlan> rows;
    rows.reserve(targets.size());
    for (double target : targets) {
        const float threshold = select_threshold(curve, target);
        rows.push_back(build_plan(pred, truth, curve, target, threshold, false));
    }
    return rows;
}

json plan_to_json(const SprayPlan& plan) {
    return json{{"threshold", plan.threshold},
                {"target_pct", plan.target_pct},
                {"achieved_pct", plan.achieved_pct},
                {"land_sprayed_acres", plan.land_sprayed_acres},
                {"land_pct", plan.land_pct},
                {"weed_acres", plan.weed_acres},
                {"excess_pct", plan.excess_pct},
                {"transfer", plan.transfer},
                {"met_target", plan.met_target}};
}

std::string render_sweep_table(const std::vector<SprayPlan>& rows) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%10s  %8s  %8s  %12s  %10s\n", "Threshold", "Weed %",
                  "Land %", "Land Acres", "Excess %");
    out << buf;
    out << std::string(10 + 2 + 8 + 2 + 8 + 2 + 12 + 2 + 10, '-') << '\n';
    for (const SprayPlan& p : rows) {
        std::snprintf(buf, sizeof(buf), "%10.4f  %8.2f  %8.2f  %12.3f  %10.2f\n", p.threshold,
                      p.achieved_pct, p.land_pct, p.land_sprayed_acres, p.excess_pct);
        out << buf;
    }
    return out.str();
}

std::string sweep_csv(const std::vector<SprayPlan>& rows) {
    std::ostringstream out;
    out << "threshold,weed_pct,land_pct,land_acres,excess_pct\n";
    char buf[200];
    for (const SprayPlan& p : rows) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g\n", p.threshold,
                      p.achieved_pct, p.land_pct, p.land_sprayed_acres, p.excess_pct);
        out << buf;
    }
    return out.str();
}

std::vector<SprayRect> mask_rectangles(const GeoRaster& mask) {
    if (mask.bands() != 1) fail(ErrorKind::Parameter, "run decomposition needs a single band");
    struct Run {
        int col, len, rect; // rect: open rectangle this run extends
    };
    std::vector<SprayRect> rects;
    std::vector<Run> prev;
    for (int r = 0; r < mask.height(); ++r) {
        std::vector<Run> cur;
        int c = 0;
        while (c < mask.width()) {
            if (mask.at(0, r, c) != 1.0f) {
                ++c;
                continue;
            }
            int len = 0;
            while (c + len < mask.width() && mask.at(0, r, c + len) == 1.0f) ++len;
            cur.push_back({c, len, -1});
            c += len;
        }
        // a run extends the rectangle above it only on an exact column match;
        // both lists are sorted by column, so one pointer suffices
        std::size_t pi = 0;
        for (Run& run : cur) {
            while (pi < prev.size() && prev[pi].col < run.col) ++pi;
            if (pi < prev.size() && prev[pi].col == run.col && prev[pi].len == run.len) {
                run.rect = prev[pi].rect;
                rects[run.rect].rows += 1;
            } else {
                run.rect = static_cast<int>(rects.size());
                rects.push_back({r, run.col, 1, run.len});
            }
        }
        prev = std::move(cur);
    }
    return rects;
}

json rects_to_json(const std::vector<SprayRect>& rects, const GeoTransform& tf) {
    json arr = json::array();
    for (const SprayRect& r : rects) {
        arr.push_back({{"row", r.row},
                       {"col", r.col},
                       {"rows", r.rows},
                       {"cols", r.cols},
                       {"x0", tf.origin_x + r.col * tf.pixel_w},
                       {"x1", tf.origin_x + (r.col + r.cols) * tf.pixel_w},
                       {"y0", tf.origin_y - (r.row + r.rows) * tf.pixel_h},
                       {"y1", tf.origin_y - r.row * tf.pixel_h}});
    }
    return arr;
}

void export_plan(const SprayPlan& plan, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_grf(plan.mask, dir / "spray_mask.grf");
    {
        std::ofstream out(dir / "plan.json");
        if (!out) fail(ErrorKind::Io, "cannot write " + (dir / "plan.json").string());
        out << plan_to_json(plan).dump(2) << '\n';
    }
    const auto rects = mask_rectangles(plan.mask);
    json runs{{"rect_count", rects.size()},
              {"rects", rects_to_json(rects, plan.mask.transform())}};
    std::ofstream out(dir / "runs.json");
    if (!out) fail(ErrorKind::Io, "cannot write " + (dir / "runs.json").string());
    out << runs.dump(2) << '\n';
}

GeoRaster mask_by_split(const GeoRaster& raster, const GeoRaster& splits, Split keep) {
    if (!raster.same_grid(splits))
        fail(ErrorKind::Alignment, "split raster is not on the data grid");
    GeoRaster out = raster;
    if (!out.nodata()) out.set_nodata(-9999.0);
    const float label = static_cast<float>(static_cast<std::uint8_t>(keep));
    for (std::size_t i = 0; i < out.pixels(); ++i) {
        const float s = splits.data()[i];
        if (splits.is_nodata(s) || s != label) out.data()[i] = out.nodata_value();
    }
    return out;
}

} // namespace spraygrid
