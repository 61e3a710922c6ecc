#include "spraygrid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spraygrid/rng.hpp"
#include "spraygrid/softmask.hpp"

namespace spraygrid {

using nlohmann::json;

std::array<BandProfile, 10> default_spectra() {
    // weed/crop contrast strongest in nir and vre2, mimicking the bright-pink
    // weed signature of the nir/green/vre2 composite
    return {{
        {0.045, 0.048, 0.008}, // b
        {0.090, 0.110, 0.010}, // g
        {0.060, 0.065, 0.010}, // r
        {0.300, 0.420, 0.020}, // nir
        {0.140, 0.170, 0.012}, // vre1
        {0.190, 0.300, 0.015}, // vre2
        {0.240, 0.300, 0.015}, // vre3
        {0.290, 0.360, 0.018}, // nnir
        {0.180, 0.210, 0.015}, // swir1
        {0.100, 0.120, 0.012}, // swir2
    }};
}

json FieldSpec::to_json() const {
    json spectra_json = json::array();
    for (const BandProfile& p : spectra)
        spectra_json.push_back(
            {{"crop_mean", p.crop_mean}, {"weed_mean", p.weed_mean}, {"sigma", p.sigma}});
    return json{{"schema", "spraygrid.fieldspec/1"},
                {"extent_x_m", extent_x_m},
                {"extent_y_m", extent_y_m},
                {"drone_pixel_m", drone_pixel_m},
                {"sat_pixel_m", sat_pixel_m},
                {"weed_patch_count", weed_patch_count},
                {"patch_radius_min_m", patch_radius_min_m},
                {"patch_radius_max_m", patch_radius_max_m},
                {"target_weed_pct", target_weed_pct},
                {"spectra", std::move(spectra_json)},
                {"prediction_snr", prediction_snr},
                {"seed", seed},
                {"crs", crs}};
}

FieldSpec FieldSpec::from_json(const json& j) {
    FieldSpec s;
    s.extent_x_m = j.value("extent_x_m", s.extent_x_m);
    s.extent_y_m = j.value("extent_y_m", s.extent_y_m);
    s.drone_pixel_m = j.value("drone_pixel_m", s.drone_pixel_m);
    s.sat_pixel_m = j.value("sat_pixel_m", s.sat_pixel_m);
    s.weed_patch_count = j.value("weed_patch_count", s.weed_patch_count);
    s.patch_radius_min_m = j.value("patch_radius_min_m", s.patch_radius_min_m);
    s.patch_radius_max_m = j.value("patch_radius_max_m", s.patch_radius_max_m);
    s.target_weed_pct = j.value("target_weed_pct", s.target_weed_pct);
    s.prediction_snr = j.value("prediction_snr", s.prediction_snr);
    s.seed = j.value("seed", s.seed);
    s.crs = j.value("crs", s.crs);
    if (j.contains("spectra")) {
        const auto& arr = j.at("spectra");
        if (!arr.is_array() || arr.size() != s.spectra.size())
            fail(ErrorKind::Schema, "field spec spectra must list 10 band profiles");
        for (std::size_t i = 0; i < s.spectra.size(); ++i) {
            s.spectra[i].crop_mean = arr[i].value("crop_mean", 0.0);
            s.spectra[i].weed_mean = arr[i].value("weed_mean", 0.0);
            s.spectra[i].sigma = arr[i].value("sigma", 0.0);
        }
    }
    return s;
}

namespace {

long exact_div(double a, double b, const char* what) {
    const double q = a / b;
    const double r = std::round(q);
    if (r < 1.0 || std::fabs(q - r) > 1e-6)
        fail(ErrorKind::Parameter, std::string(what) + " must divide evenly");
    return static_cast<long>(r);
}

struct Ellipse {
    double cx, cy, r1, r2, cos_t, sin_t;
};

// Collects drone pixels newly covered by the ellipse shrunk by scale.
void covered_pixels(const Ellipse& e, double scale, const GeoRaster& mask,
                    std::vector<std::size_t>& out) {
    out.clear();
    const GeoTransform& tf = mask.transform();
    const double rmax = std::max(e.r1, e.r2) * scale;
    const int c0 = std::max(0, static_cast<int>(std::floor(tf.col_of_x(e.cx - rmax))));
    const int c1 = std::min(mask.width() - 1,
                            static_cast<int>(std::ceil(tf.col_of_x(e.cx + rmax))));
    const int r0 = std::max(0, static_cast<int>(std::floor(tf.row_of_y(e.cy + rmax))));
    const int r1i = std::min(mask.height() - 1,
                             static_cast<int>(std::ceil(tf.row_of_y(e.cy - rmax))));
    const double a = e.r1 * scale, b = e.r2 * scale;
    for (int r = r0; r <= r1i; ++r) {
        const double y = tf.pixel_center_y(r) - e.cy;
        for (int c = c0; c <= c1; ++c) {
            const double x = tf.pixel_center_x(c) - e.cx;
            const double u = e.cos_t * x + e.sin_t * y;
            const double v = -e.sin_t * x + e.cos_t * y;
            if ((u * u) / (a * a) + (v * v) / (b * b) > 1.0) continue;
            const std::size_t idx = static_cast<std::size_t>(r) * mask.width() + c;
            if (mask.data()[idx] == 0.0f) out.push_back(idx);
        }
    }
}

void paint_patches(GeoRaster& mask, const FieldSpec& spec, Rng& rng) {
    const std::size_t total = mask.pixels();
    const double target = spec.target_weed_pct;
    std::size_t painted = 0;
    auto frac_pct = [&] { return 100.0 * static_cast<double>(painted) / total; };

    std::vector<std::size_t> candidate;
    int budget = spec.weed_patch_count;
    while (budget-- > 0 && frac_pct() < target - 0.25) {
        Ellipse e;
        e.cx = rng.uniform(0.0, spec.extent_x_m);
        e.cy = rng.uniform(0.0, spec.extent_y_m);
        e.r1 = rng.uniform(spec.patch_radius_min_m, spec.patch_radius_max_m);
        e.r2 = rng.uniform(spec.patch_radius_min_m, spec.patch_radius_max_m);
        const double theta = rng.uniform(0.0, 3.14159265358979323846);
        e.cos_t = std::cos(theta);
        e.sin_t = std::sin(theta);

        covered_pixels(e, 1.0, mask, candidate);
        const double full_pct = frac_pct() + 100.0 * candidate.size() / total;
        if (full_pct > target + 0.75) {
            // overshoot: shrink the final patch by bisection to land on target
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 28; ++it) {
                const double mid = 0.5 * (lo + hi);
                covered_pixels(e, mid, mask, candidate);
                const double pct = frac_pct() + 100.0 * candidate.size() / total;
                if (pct > target + 0.25)
                    hi = mid;
                else
                    lo = mid;
            }
            covered_pixels(e, lo, mask, candidate);
        }
        for (std::size_t idx : candidate) mask.data()[idx] = 1.0f;
        painted += candidate.size();
    }

    if (std::fabs(frac_pct() - target) > 1.0)
        fail(ErrorKind::Infeasible,
             "cannot reach the target weed fraction with this patch budget/radii");
}

} // namespace

SynthField generate(const FieldSpec& spec) {
    if (spec.extent_x_m <= 0 || spec.extent_y_m <= 0 || spec.drone_pixel_m <= 0 ||
        spec.sat_pixel_m <= 0)
        fail(ErrorKind::Parameter, "field extents and pixel sizes must be positive");
    if (spec.weed_patch_count < 0)
        fail(ErrorKind::Parameter, "weed_patch_count must be >= 0");
    if (spec.target_weed_pct < 0 || spec.target_weed_pct > 100)
        fail(ErrorKind::Parameter, "target_weed_pct must be in [0,100]");
    if (spec.weed_patch_count > 0 &&
        (spec.patch_radius_min_m <= 0 || spec.patch_radius_max_m < spec.patch_radius_min_m))
        fail(ErrorKind::Parameter, "patch radii must satisfy 0 < min <= max");
    if (spec.prediction_snr <= 0) fail(ErrorKind::Parameter, "prediction_snr must be > 0");

    const long ratio = exact_div(spec.sat_pixel_m, spec.drone_pixel_m,
                                 "sat_pixel_m / drone_pixel_m");
    const long sw = exact_div(spec.extent_x_m, spec.sat_pixel_m, "extent_x / sat_pixel");
    const long sh = exact_div(spec.extent_y_m, spec.sat_pixel_m, "extent_y / sat_pixel");

    const GeoTransform drone_tf{0.0, spec.extent_y_m, spec.drone_pixel_m, spec.drone_pixel_m};
    SynthField field;
    field.drone_mask = GeoRaster(static_cast<int>(sw * ratio), static_cast<int>(sh * ratio), 1,
                                 DType::U8, drone_tf, spec.crs);

    Rng patch_rng(spec.seed, 1);
    if (spec.weed_patch_count > 0) paint_patches(field.drone_mask, spec, patch_rng);

    field.fraction_mask = block_fraction(field.drone_mask, static_cast<int>(ratio));

    // satellite bands: linear crop/weed mixture by pixel fraction plus noise
    const GeoTransform sat_tf = field.fraction_mask.transform();
    field.satellite = GeoRaster(static_cast<int>(sw), static_cast<int>(sh), 10, DType::F32,
                                sat_tf, spec.crs);
    std::vector<std::string> names(BandSet::role_names().begin(), BandSet::role_names().end());
    field.satellite.set_band_names(names);
    const std::size_t px = field.satellite.pixels();
    for (int b = 0; b < 10; ++b) {
        Rng band_rng(spec.seed, 100 + static_cast<std::uint64_t>(b));
        const BandProfile& profile = spec.spectra[b];
        for (std::size_t i = 0; i < px; ++i) {
            const double f = field.fraction_mask.data()[i];
            const double v = (1.0 - f) * profile.crop_mean + f * profile.weed_mean +
                             profile.sigma * band_rng.normal();
            field.satellite.data()[static_cast<std::size_t>(b) * px + i] =
                static_cast<float>(v);
        }
    }

    // noisy prediction at the requested signal-to-noise ratio
    double mean = 0.0;
    for (std::size_t i = 0; i < px; ++i) mean += field.fraction_mask.data()[i];
    mean /= static_cast<double>(px);
    double var = 0.0;
    for (std::size_t i = 0; i < px; ++i) {
        const double d = field.fraction_mask.data()[i] - mean;
        var += d * d;
    }
    const double noise_sd = std::sqrt(var / static_cast<double>(px)) / spec.prediction_snr;

    field.prediction = GeoRaster(static_cast<int>(sw), static_cast<int>(sh), 1, DType::F32,
                                 sat_tf, spec.crs);
    Rng pred_rng(spec.seed, 200);
    for (std::size_t i = 0; i < px; ++i) {
        const double v = field.fraction_mask.data()[i] + noise_sd * pred_rng.normal();
        field.prediction.data()[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return field;
}

} // namespace spraygrid
