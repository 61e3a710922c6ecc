#include "spraygrid/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace spraygrid {

namespace {

constexpr int kWidth = 900, kHeight = 600;
constexpr int kMarginL = 70, kMarginR = 210, kMarginT = 40, kMarginB = 55;

const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
        "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
    return colors;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// round axis bounds outward to a tidy step
void nice_axis(double lo, double hi, double& out_lo, double& out_hi, double& out_step) {
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    out_lo = std::floor(lo / step) * step;
    out_hi = std::ceil(hi / step) * step;
    out_step = step;
}

double excess_of(const ModelRecord& r, int target) {
    const auto it = r.excess.find(target);
    return it == r.excess.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
}

// marker shapes cycle per architecture, first appearance order
void emit_marker(std::ostringstream& out, int shape, double x, double y, double radius,
                 const std::string& color) {
    char buf[320];
    switch (shape % 4) {
        case 0:
            std::snprintf(buf, sizeof(buf),
                          "  <circle cx=\"%s\" cy=\"%s\" r=\"%s\" fill=\"%s\" "
                          "fill-opacity=\"0.75\" stroke=\"#333\"/>\n",
                          fmt(x).c_str(), fmt(y).c_str(), fmt(radius).c_str(), color.c_str());
            break;
        case 1:
            std::snprintf(buf, sizeof(buf),
                          "  <rect x=\"%s\" y=\"%s\" width=\"%s\" height=\"%s\" fill=\"%s\" "
                          "fill-opacity=\"0.75\" stroke=\"#333\"/>\n",
                          fmt(x - radius).c_str(), fmt(y - radius).c_str(),
                          fmt(2 * radius).c_str(), fmt(2 * radius).c_str(), color.c_str());
            break;
        case 2:
            std::snprintf(buf, sizeof(buf),
                          "  <polygon points=\"%s,%s %s,%s %s,%s\" fill=\"%s\" "
                          "fill-opacity=\"0.75\" stroke=\"#333\"/>\n",
                          fmt(x).c_str(), fmt(y - radius).c_str(), fmt(x - radius).c_str(),
                          fmt(y + radius).c_str(), fmt(x + radius).c_str(),
                          fmt(y + radius).c_str(), color.c_str());
            break;
        default:
            std::snprintf(buf, sizeof(buf),
                          "  <polygon points=\"%s,%s %s,%s %s,%s %s,%s\" fill=\"%s\" "
                          "fill-opacity=\"0.75\" stroke=\"#333\"/>\n",
                          fmt(x).c_str(), fmt(y - radius).c_str(), fmt(x + radius).c_str(),
                          fmt(y).c_str(), fmt(x).c_str(), fmt(y + radius).c_str(),
                          fmt(x - radius).c_str(), fmt(y).c_str(), color.c_str());
            break;
    }
    out << buf;
}

} // namespace

std::string landscape_svg(const SweepReport& report) {
    if (report.records.empty()) fail(ErrorKind::Parameter, "nothing to plot");

    // color per encoder group, shape per architecture; order of first
    // appearance over the report's (already sorted) records
    std::vector<std::string> groups, archs;
    for (const ModelRecord& r : report.records) {
        if (std::find(groups.begin(), groups.end(), r.encoder_group) == groups.end())
            groups.push_back(r.encoder_group);
        if (std::find(archs.begin(), archs.end(), r.architecture) == archs.end())
            archs.push_back(r.architecture);
    }

    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const ModelRecord& r : report.records) {
        const double e = excess_of(r, report.primary_target);
        if (std::isnan(e)) continue;
        x_lo = std::min(x_lo, r.size_mb);
        x_hi = std::max(x_hi, r.size_mb);
        y_lo = std::min(y_lo, e);
        y_hi = std::max(y_hi, e);
    }
    if (x_lo > x_hi)
        fail(ErrorKind::Parameter, "no record carries the primary target");
    double xs, ys;
    nice_axis(x_lo, x_hi, x_lo, x_hi, xs);
    nice_axis(y_lo, y_hi, y_lo, y_hi, ys);

    const double pw = kWidth - kMarginL - kMarginR;
    const double ph = kHeight - kMarginT - kMarginB;
    auto px = [&](double v) { return kMarginL + (v - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double v) { return kMarginT + ph - (v - y_lo) / (y_hi - y_lo) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";

    char buf[400];
    // axes + grid
    for (double v = x_lo; v <= x_hi + xs * 0.5; v += xs) {
        std::snprintf(buf, sizeof(buf),
                      "  <line x1=\"%s\" y1=\"%d\" x2=\"%s\" y2=\"%s\" stroke=\"#ddd\"/>\n",
                      fmt(px(v)).c_str(), kMarginT, fmt(px(v)).c_str(),
                      fmt(kMarginT + ph).c_str());
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%s\" y=\"%s\" font-size=\"12\" text-anchor=\"middle\" "
                      "fill=\"#333\">%g</text>\n",
                      fmt(px(v)).c_str(), fmt(kMarginT + ph + 18).c_str(), v);
        out << buf;
    }
    for (double v = y_lo; v <= y_hi + ys * 0.5; v += ys) {
        std::snprintf(buf, sizeof(buf),
                      "  <line x1=\"%d\" y1=\"%s\" x2=\"%s\" y2=\"%s\" stroke=\"#ddd\"/>\n",
                      kMarginL, fmt(py(v)).c_str(), fmt(kMarginL + pw).c_str(),
                      fmt(py(v)).c_str());
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%s\" y=\"%s\" font-size=\"12\" text-anchor=\"end\" "
                      "fill=\"#333\">%g</text>\n",
                      fmt(kMarginL - 8).c_str(), fmt(py(v) + 4).c_str(), v);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"%s\" y=\"%d\" font-size=\"14\" text-anchor=\"middle\" "
                  "fill=\"#111\">Model size (MB)</text>\n",
                  fmt(kMarginL + pw / 2).c_str(), kHeight - 12);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "  <text x=\"18\" y=\"%s\" font-size=\"14\" text-anchor=\"middle\" "
                  "fill=\"#111\" transform=\"rotate(-90 18 %s)\">Excess %% at %d%% "
                  "coverage</text>\n",
                  fmt(kMarginT + ph / 2).c_str(), fmt(kMarginT + ph / 2).c_str(),
                  report.primary_target);
    out << buf;

    // markers; area tracks inference time (1 / relative_speed)
    for (const ModelRecord& r : report.records) {
        const double e = excess_of(r, report.primary_target);
        if (std::isnan(e)) continue;
        const double radius = 6.0 * std::sqrt(1.0 / r.relative_speed) + 2.0;
        const std::size_t gi =
            std::find(groups.begin(), groups.end(), r.encoder_group) - groups.begin();
        const std::size_t ai =
            std::find(archs.begin(), archs.end(), r.architecture) - archs.begin();
        emit_marker(out, static_cast<int>(ai), px(r.size_mb), py(e), radius,
                    palette()[gi % palette().size()]);
    }

    // legend: encoder groups (color), then architectures (shape)
    double ly = kMarginT + 10;
    const double lx = kMarginL + pw + 25;
    out << "  <text x=\"" << fmt(lx) << "\" y=\"" << fmt(ly)
        << "\" font-size=\"13\" fill=\"#111\">Encoder group</text>\n";
    ly += 8;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        ly += 18;
        std::snprintf(buf, sizeof(buf),
                      "  <circle cx=\"%s\" cy=\"%s\" r=\"6\" fill=\"%s\" "
                      "fill-opacity=\"0.75\" stroke=\"#333\"/>\n",
                      fmt(lx + 6).c_str(), fmt(ly - 4).c_str(),
                      palette()[g % palette().size()].c_str());
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%s\" y=\"%s\" font-size=\"12\" fill=\"#333\">%s</text>\n",
                      fmt(lx + 18).c_str(), fmt(ly).c_str(), groups[g].c_str());
        out << buf;
    }
    ly += 28;
    out << "  <text x=\"" << fmt(lx) << "\" y=\"" << fmt(ly)
        << "\" font-size=\"13\" fill=\"#111\">Architecture</text>\n";
    ly += 8;
    for (std::size_t a = 0; a < archs.size(); ++a) {
        ly += 18;
        std::ostringstream marker;
        emit_marker(marker, static_cast<int>(a), lx + 6, ly - 4, 6.0, "#999");
        out << marker.str();
        std::snprintf(buf, sizeof(buf),
                      "  <text x=\"%s\" y=\"%s\" font-size=\"12\" fill=\"#333\">%s</text>\n",
                      fmt(lx + 18).c_str(), fmt(ly).c_str(), archs[a].c_str());
        out << buf;
    }

    out << "</svg>\n";
    return out.str();
}

std::string landscape_csv(const SweepReport& report) {
    std::vector<int> targets;
    for (const ModelRecord& r : report.records)
        for (const auto& [t, _] : r.excess)
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
    std::sort(targets.begin(), targets.end());

    std::ostringstream out;
    out << "architecture,encoder,encoder_group,loss,size_mb,relative_speed";
    for (int t : targets) out << ",excess_" << t;
    out << "\n";
    char buf[64];
    for (const ModelRecord& r : report.records) {
        out << r.architecture << ',' << r.encoder << ',' << r.encoder_group << ',' << r.loss;
        std::snprintf(buf, sizeof(buf), ",%.9g,%.9g", r.size_mb, r.relative_speed);
        out << buf;
        for (int t : targets) {
            const auto it = r.excess.find(t);
            if (it == r.excess.end()) {
                out << ',';
            } else {
                std::snprintf(buf, sizeof(buf), ",%.9g", it->second);
                out << buf;
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace spraygrid
