#pragma once

// The published 12-model comparison used by the registry tests and the
// acceptance suite: architecture, encoder, loss, size (MB), relative speed
// and excess percentages at the 90/95/98/99 coverage targets.

#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace testutil {

struct PublishedModel {
    const char* architecture;
    const char* encoder;
    const char* loss;
    double size_mb;
    double speed;
    double e90, e95, e98, e99;
};

inline const std::vector<PublishedModel>& published_models() {
    static const std::vector<PublishedModel> rows = {
        {"UNET++", "VGG19", "BCE", 179, 1.0, -4.11, 6.30, 18.63, 28.09},
        {"UNET++", "VGG16", "Focal", 158, 1.3, -3.74, 6.98, 18.99, 28.36},
        {"UNET++", "VGG16", "SoftBCE", 158, 1.5, -4.24, 6.14, 18.43, 28.45},
        {"UNET", "VGG19", "BCE", 116, 4.4, -3.77, 6.73, 19.33, 29.22},
        {"UNET", "VGG19", "Focal", 116, 3.0, -4.63, 6.04, 19.30, 29.82},
        {"FPN", "VGG16", "Focal", 67, 3.0, -3.10, 8.35, 21.59, 31.83},
        {"UNET", "MIT_b0", "SoftBCE", 22, 1.6, -2.58, 8.45, 21.98, 33.02},
        {"UNET", "VGG13", "BCE", 74, 5.06, -1.95, 9.73, 23.48, 34.63},
        {"FPN", "MIT_b0", "Focal", 20, 2.55, -2.65, 9.25, 23.72, 35.11},
        {"FPN", "MIT_b0", "BCE", 20, 2.58, -1.54, 11.00, 26.14, 37.90},
        {"UNET", "VGG11", "BCE", 73, 6.18, -1.68, 11.03, 26.51, 38.84},
        {"UNET", "TIMM_REGNETX_002", "BCE", 19, 8.46, -1.56, 10.83, 26.58, 39.85},
    };
    return rows;
}

inline nlohmann::json published_record_json(const PublishedModel& row) {
    return nlohmann::json{
        {"schema", "spraygrid.model-record/1"},
        {"architecture", row.architecture},
        {"encoder", row.encoder},
        {"loss", row.loss},
        {"size_mb", row.size_mb},
        {"relative_speed", row.speed},
        {"excess",
         {{"90", row.e90}, {"95", row.e95}, {"98", row.e98}, {"99", row.e99}}}};
}

inline void write_published_registry(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    int i = 0;
    for (const PublishedModel& row : published_models()) {
        char name[32];
        std::snprintf(name, sizeof(name), "record_%02d.json", i++);
        std::ofstream out(dir / name);
        out << published_record_json(row).dump(2) << '\n';
    }
}

} // namespace testutil
