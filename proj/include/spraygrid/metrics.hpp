#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace spraygrid {

// The table's R^2 column can be read two ways; both are implemented and the
// flag picks one. Determination is 1 - SS_res/SS_tot; PearsonSquared is the
// squared linear correlation (scale/offset-invariant).
enum class R2Variant { Determination, PearsonSquared };

R2Variant r2_variant_from_name(const std::string& name);
const char* r2_variant_name(R2Variant v);

struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
    R2Variant variant = R2Variant::Determination;
};

// Lengths must match and be >= 2; constant truth makes r2 undefined (error).
// A constant prediction has zero Pearson correlation by convention.
MetricsReport compute_metrics(std::span<const float> pred, std::span<const float> truth,
                              R2Variant variant = R2Variant::Determination);

nlohmann::json metrics_to_json(const MetricsReport& m);

// Aligned text table, one row per named model: Model | RMSE | MAE | R2.
std::string render_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows);

} // namespace spraygrid
