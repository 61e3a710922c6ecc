#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spraygrid/georaster.hpp"

namespace spraygrid {

// Registry entry for an externally trained segmentation model. Excess values
// map coverage target (percent) to excess spraying percent; they are either
// declared by the metadata or recomputed from the model's prediction raster.
struct ModelRecord {
    std::string architecture;
    std::string encoder;
    std::string encoder_group;
    std::string loss;
    double size_mb = 0.0;
    double relative_speed = 0.0; // top model = 1.0
    std::map<int, double> excess;
    std::string prediction_path; // optional raster reference
    bool declared = true;        // false once metrics were recomputed

    std::string display_name() const; // architecture/encoder/loss
};

// Longest alphabetic prefix before the first digit, '_' trimmed, with an
// override table for encoder families that break the pattern.
std::string encoder_group_of(const std::string& encoder);

// Rasters needed to recompute excess values from a prediction raster:
// threshold selected on the held-out subset, excess reported on test.
struct IngestContext {
    const GeoRaster* truth = nullptr;  // fraction or binary annotation
    const GeoRaster* splits = nullptr; // split labels on the same grid
    std::vector<double> targets = {90, 95, 98, 99};
    std::filesystem::path base_dir;    // prediction_path resolves against this
};

// Builds a record from metadata JSON (schema spraygrid.model-record/1).
// With a prediction raster and a context, excess values are recomputed;
// declared values must then agree within 0.01 points or ingestion fails
// with an integrity error.
ModelRecord ingest_record(const nlohmann::json& metadata, const IngestContext* ctx = nullptr);

nlohmann::json record_to_json(const ModelRecord& r);

// Loads every *.json record in a registry directory, sorted by filename.
std::vector<ModelRecord> load_registry(const std::filesystem::path& dir,
                                       const IngestContext* ctx = nullptr);

// Records ranked at one primary coverage target. Sorting is deterministic:
// excess ascending, then size ascending, then display name.
struct SweepReport {
    int primary_target = 99;
    std::vector<ModelRecord> records;
};

SweepReport sweep_report(std::vector<ModelRecord> records, int primary_target);

// Per loss function, the record with the lowest excess at the primary
// target; optionally restricted to one architecture. Ties prefer the
// smaller model, then the lexicographically first name.
SweepReport best_per_loss(const std::vector<ModelRecord>& records, int primary_target,
                          const std::string& architecture_filter = std::string());

nlohmann::json report_to_json(const SweepReport& report);
std::string render_report_table(const SweepReport& report);

} // namespace spraygrid
