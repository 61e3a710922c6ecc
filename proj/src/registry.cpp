#include "spraygrid/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "spraygrid/grf.hpp"
#include "spraygrid/planner.hpp"

namespace spraygrid {

using nlohmann::json;

namespace {
constexpr const char* kRecordSchema = "spraygrid.model-record/1";
constexpr double kRecomputeTolerancePoints = 0.01;
} // namespace

std::string ModelRecord::display_name() const {
    return architecture + "/" + encoder + "/" + loss;
}

std::string encoder_group_of(const std::string& encoder) {
    // families whose names break the prefix-before-digits pattern
    static const std::map<std::string, std::string> overrides = {
        {"MIT_b0", "MIT"},         {"MIT_b1", "MIT"},
        {"MIT_b2", "MIT"},         {"MIT_b3", "MIT"},
        {"MIT_b4", "MIT"},         {"MIT_b5", "MIT"},
        {"TIMM_REGNETX_002", "TIMM_REGNETX"},
        {"TIMM_REGNETX_004", "TIMM_REGNETX"},
        {"TIMM_REGNETX_006", "TIMM_REGNETX"},
        {"TIMM_REGNETX_008", "TIMM_REGNETX"},
    };
    if (auto it = overrides.find(encoder); it != overrides.end()) return it->second;

    std::string prefix;
    for (char ch : encoder) {
        if (std::isdigit(static_cast<unsigned char>(ch))) break;
        prefix.push_back(ch);
    }
    while (!prefix.empty() && prefix.back() == '_') prefix.pop_back();
    return prefix.empty() ? encoder : prefix;
}

namespace {

// Recomputes the excess map from a prediction raster: thresholds selected on
// the held-out subset, excess reported on the test subset.
std::map<int, double> recompute_excess(const std::filesystem::path& pred_path,
                                       const IngestContext& ctx) {
    if (!ctx.truth || !ctx.splits)
        fail(ErrorKind::Parameter,
             "recomputation needs truth and split rasters in the ingest context");
    const GeoRaster pred = read_raster(pred_path);

    const GeoRaster pred_sel = mask_by_split(pred, *ctx.splits, Split::Heldout);
    const GeoRaster truth_sel = mask_by_split(*ctx.truth, *ctx.splits, Split::Heldout);
    const GeoRaster pred_eval = mask_by_split(pred, *ctx.splits, Split::Test);
    const GeoRaster truth_eval = mask_by_split(*ctx.truth, *ctx.splits, Split::Test);

    const CoverageCurve selection = coverage_curve(pred_sel, truth_sel);
    std::map<int, double> excess;
    for (double target : ctx.targets) {
        const float threshold = select_threshold(selection, target);
        const SprayPlan plan = make_plan_transfer(pred_eval, truth_eval, target, threshold);
        excess[static_cast<int>(std::lround(target))] = plan.excess_pct;
    }
    return excess;
}

} // namespace

ModelRecord ingest_record(const json& metadata, const IngestContext* ctx) {
    if (metadata.value("schema", std::string()) != kRecordSchema)
        fail(ErrorKind::Schema,
             std::string("model record must declare schema '") + kRecordSchema + "'");
    for (const char* key : {"architecture", "encoder", "loss"})
        if (!metadata.contains(key) || !metadata.at(key).is_string())
            fail(ErrorKind::Schema, std::string("model record is missing '") + key + "'");

    ModelRecord rec;
    rec.architecture = metadata.at("architecture").get<std::string>();
    rec.encoder = metadata.at("encoder").get<std::string>();
    rec.loss = metadata.at("loss").get<std::string>();
    rec.size_mb = metadata.value("size_mb", 0.0);
    rec.relative_speed = metadata.value("relative_speed", 0.0);
    if (rec.size_mb <= 0.0)
        fail(ErrorKind::Schema, "model record needs size_mb > 0: " + rec.display_name());
    if (rec.relative_speed <= 0.0)
        fail(ErrorKind::Schema,
             "model record needs relative_speed > 0: " + rec.display_name());

    rec.encoder_group = metadata.contains("encoder_group")
                            ? metadata.at("encoder_group").get<std::string>()
                            : encoder_group_of(rec.encoder);

    std::map<int, double> declared;
    if (metadata.contains("excess")) {
        for (const auto& [key, value] : metadata.at("excess").items()) {
            int target = 0;
            try {
                target = std::stoi(key);
            } catch (...) {
                fail(ErrorKind::Schema, "excess keys must be integer coverage targets");
            }
            if (!value.is_number())
                fail(ErrorKind::Schema, "excess values must be numbers");
            declared[target] = value.get<double>();
        }
    }
    rec.prediction_path = metadata.value("prediction_path", std::string());

    if (!rec.prediction_path.empty() && ctx) {
        auto path = std::filesystem::path(rec.prediction_path);
        if (path.is_relative()) path = ctx->base_dir / path;
        const auto recomputed = recompute_excess(path, *ctx);
        for (const auto& [target, value] : declared) {
            const auto it = recomputed.find(target);
            if (it == recomputed.end()) continue;
            if (std::fabs(it->second - value) > kRecomputeTolerancePoints) {
                char buf[200];
                std::snprintf(buf, sizeof(buf),
                              "%s: declared excess at %d%% is %.4f but recomputation gives "
                              "%.4f (tolerance %.2f points)",
                              rec.display_name().c_str(), target, value, it->second,
                              kRecomputeTolerancePoints);
                fail(ErrorKind::Integrity, buf);
            }
        }
        rec.excess = recomputed;
        rec.declared = false;
    } else {
        if (declared.empty())
            fail(ErrorKind::Schema,
                 "model record needs declared excess values or a prediction raster: " +
                     rec.display_name());
        rec.excess = declared;
        rec.declared = true;
    }
    return rec;
}

json record_to_json(const ModelRecord& r) {
    json excess = json::object();
    for (const auto& [target, value] : r.excess) excess[std::to_string(target)] = value;
    json j{{"schema", kRecordSchema},
           {"architecture", r.architecture},
           {"encoder", r.encoder},
           {"encoder_group", r.encoder_group},
           {"loss", r.loss},
           {"size_mb", r.size_mb},
           {"relative_speed", r.relative_speed},
           {"excess", std::move(excess)},
           {"declared", r.declared}};
    if (!r.prediction_path.empty()) j["prediction_path"] = r.prediction_path;
    return j;
}

std::vector<ModelRecord> load_registry(const std::filesystem::path& dir,
                                       const IngestContext* ctx) {
    if (!std::filesystem::is_directory(dir))
        fail(ErrorKind::Io, "registry directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<ModelRecord> records;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) fail(ErrorKind::Io, "cannot open " + file.string());
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded()) fail(ErrorKind::Schema, "invalid JSON in " + file.string());
        IngestContext local;
        if (ctx) {
            local = *ctx;
            if (local.base_dir.empty()) local.base_dir = dir;
        }
        records.push_back(ingest_record(j, ctx ? &local : nullptr));
    }
    return records;
}

namespace {

double excess_at(const ModelRecord& r, int target) {
    const auto it = r.excess.find(target);
    return it == r.excess.end() ? std::numeric_limits<double>::infinity() : it->second;
}

void sort_records(std::vector<ModelRecord>& records, int target) {
    std::stable_sort(records.begin(), records.end(),
                     [target](const ModelRecord& a, const ModelRecord& b) {
                         const double ea = excess_at(a, target), eb = excess_at(b, target);
                         if (ea != eb) return ea < eb;
                         if (a.size_mb != b.size_mb) return a.size_mb < b.size_mb;
                         return a.display_name() < b.display_name();
                     });
}

} // namespace

SweepReport sweep_report(std::vector<ModelRecord> records, int primary_target) {
    if (records.empty()) fail(ErrorKind::Parameter, "registry holds no records");
    SweepReport report;
    report.primary_target = primary_target;
    report.records = std::move(records);
    sort_records(report.records, primary_target);
    return report;
}

SweepReport best_per_loss(const std::vector<ModelRecord>& records, int primary_target,
                          const std::string& architecture_filter) {
    if (records.empty()) fail(ErrorKind::Parameter, "registry holds no records");
    std::map<std::string, const ModelRecord*> winners;
    for (const ModelRecord& r : records) {
        if (!architecture_filter.empty() && r.architecture != architecture_filter) continue;
        if (r.excess.find(primary_target) == r.excess.end()) continue;
        auto [it, inserted] = winners.emplace(r.loss, &r);
        if (inserted) continue;
        const ModelRecord& cur = *it->second;
        const double er = excess_at(r, primary_target), ec = excess_at(cur, primary_target);
        const bool better = er < ec ||
                            (er == ec && (r.size_mb < cur.size_mb ||
                                          (r.size_mb == cur.size_mb &&
                                           r.display_name() < cur.display_name())));
        if (better) it->second = &r;
    }

    SweepReport report;
    report.primary_target = primary_target;
    for (const auto& [loss, rec] : winners) report.records.push_back(*rec);
    sort_records(report.records, primary_target);
    return report;
}

json report_to_json(const SweepReport& report) {
    json records = json::array();
    for (const ModelRecord& r : report.records) records.push_back(record_to_json(r));
    return json{{"primary_target", report.primary_target}, {"records", std::move(records)}};
}

std::string render_report_table(const SweepReport& report) {
    // collect the union of targets so every column prints
    std::vector<int> targets;
    for (const ModelRecord& r : report.records)
        for (const auto& [t, _] : r.excess)
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
    std::sort(targets.begin(), targets.end());

    std::size_t name_w = 5;
    for (const ModelRecord& r : report.records)
        name_w = std::max(name_w, r.display_name().size());

    std::ostringstream out;
    char buf[64];
    out << "Model" << std::string(name_w - 5, ' ');
    std::snprintf(buf, sizeof(buf), "  %8s  %6s", "Size MB", "Speed");
    out << buf;
    for (int t : targets) {
        std::snprintf(buf, sizeof(buf), "  %7d%%", t);
        out << buf;
    }
    out << '\n';
    for (const ModelRecord& r : report.records) {
        out << r.display_name() << std::string(name_w - r.display_name().size(), ' ');
        std::snprintf(buf, sizeof(buf), "  %8.1f  %6.2f", r.size_mb, r.relative_speed);
        out << buf;
        for (int t : targets) {
            const auto it = r.excess.find(t);
            if (it == r.excess.end())
                std::snprintf(buf, sizeof(buf), "  %8s", "-");
            else
                std::snprintf(buf, sizeof(buf), "  %7.2f%%", it->second);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace spraygrid
