#include "spraygrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spraygrid/errors.hpp"

namespace spraygrid {

R2Variant r2_variant_from_name(const std::string& name) {
    if (name == "determination") return R2Variant::Determination;
    if (name == "pearson") return R2Variant::PearsonSquared;
    fail(ErrorKind::Parameter, "unknown r2 variant '" + name +
                                   "' (expected determination or pearson)");
}

const char* r2_variant_name(R2Variant v) {
    return v == R2Variant::Determination ? "determination" : "pearson";
}

MetricsReport compute_metrics(std::span<const float> pred, std::span<const float> truth,
                              R2Variant variant) {
    if (pred.size() != truth.size())
        fail(ErrorKind::Parameter, "metrics: prediction/truth length mismatch");
    if (truth.size() < 2) fail(ErrorKind::Parameter, "metrics: need at least 2 samples");

    const std::size_t n = truth.size();
    double se = 0.0, ae = 0.0, ybar = 0.0, pbar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pred[i]) - truth[i];
        se += d * d;
        ae += std::fabs(d);
        ybar += truth[i];
        pbar += pred[i];
    }
    ybar /= static_cast<double>(n);
    pbar /= static_cast<double>(n);

    double ss_tot = 0.0, pp = 0.0, py = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = truth[i] - ybar;
        const double dp = pred[i] - pbar;
        ss_tot += dy * dy;
        pp += dp * dp;
        py += dp * dy;
    }
    if (ss_tot <= 0.0)
        fail(ErrorKind::Validation, "metrics: r2 is undefined for constant truth");

    MetricsReport m;
    m.variant = variant;
    m.rmse = std::sqrt(se / static_cast<double>(n));
    m.mae = ae / static_cast<double>(n);
    if (variant == R2Variant::Determination) {
        m.r2 = 1.0 - se / ss_tot;
    } else {
        // constant predictions carry no linear association
        m.r2 = pp <= 0.0 ? 0.0 : (py * py) / (pp * ss_tot);
    }
    return m;
}

nlohmann::json metrics_to_json(const MetricsReport& m) {
    return nlohmann::json{
        {"rmse", m.rmse}, {"mae", m.mae}, {"r2", m.r2}, {"r2_variant", r2_variant_name(m.variant)}};
}

std::string render_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::size_t name_w = 5;
    for (const auto& [name, _] : rows) name_w = std::max(name_w, name.size());

    char buf[64];
    std::ostringstream table;
    table << "Model" << std::string(name_w - 5, ' ');
    std::snprintf(buf, sizeof(buf), "  %8s  %8s  %8s\n", "RMSE", "MAE", "R2");
    table << buf;
    table << std::string(name_w + 2 + 8 + 2 + 8 + 2 + 8, '-') << '\n';
    for (const auto& [name, m] : rows) {
        table << name << std::string(name_w - name.size(), ' ');
        std::snprintf(buf, sizeof(buf), "  %8.4f  %8.4f  %8.4f\n", m.rmse, m.mae, m.r2);
        table << buf;
    }
    return table.str();
}

} // namespace spraygrid
