#include "spraygrid/features.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace spraygrid {

void FeatureTable::add_row(std::span<const float> features, float target, Split split) {
    if (features.size() != kFeatures)
        fail(ErrorKind::Parameter, "feature rows must have exactly 10 columns");
    if (!(target >= 0.0f && target <= 1.0f))
        fail(ErrorKind::Validation, "targets must be fractions in [0,1]");
    x_.insert(x_.end(), features.begin(), features.end());
    targets_.push_back(target);
    splits_.push_back(split);
}

std::size_t FeatureTable::count(Split s) const {
    std::size_t n = 0;
    for (Split v : splits_)
        if (v == s) ++n;
    return n;
}

Dataset FeatureTable::dataset(Split s) const {
    Dataset d;
    d.cols = kFeatures;
    for (std::size_t i = 0; i < rows(); ++i) {
        if (splits_[i] != s) continue;
        const auto f = features(i);
        d.x.insert(d.x.end(), f.begin(), f.end());
        d.y.push_back(targets_[i]);
    }
    d.rows = d.y.size();
    return d;
}

Dataset FeatureTable::dataset_all() const {
    Dataset d;
    d.cols = kFeatures;
    d.x = x_;
    d.y = targets_;
    d.rows = targets_.size();
    return d;
}

namespace {

const char* kCsvHeader = "b,g,r,nir,vre1,vre2,vre3,nnir,swir1,swir2,target,split";

} // namespace

void FeatureTable::write_csv(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << kCsvHeader << '\n';
    char buf[64];
    for (std::size_t i = 0; i < rows(); ++i) {
        const auto f = features(i);
        for (std::size_t c = 0; c < kFeatures; ++c) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(f[c]));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(targets_[i]));
        out << buf << ',' << split_name(splits_[i]) << '\n';
    }
}

FeatureTable FeatureTable::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Schema, "empty feature CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        fail(ErrorKind::Schema, std::string("feature CSV header must be '") + kCsvHeader + "'");

    FeatureTable table;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::array<float, kFeatures> f{};
        for (std::size_t c = 0; c < kFeatures; ++c) {
            if (!std::getline(ss, cell, ','))
                fail(ErrorKind::Schema,
                     "feature CSV line " + std::to_string(lineno) + ": too few columns");
            f[c] = std::stof(cell);
        }
        if (!std::getline(ss, cell, ','))
            fail(ErrorKind::Schema,
                 "feature CSV line " + std::to_string(lineno) + ": missing target");
        const float target = std::stof(cell);
        if (!std::getline(ss, cell, ','))
            fail(ErrorKind::Schema,
                 "feature CSV line " + std::to_string(lineno) + ": missing split");
        table.add_row(f, target, split_from_name(cell));
    }
    return table;
}

namespace {
constexpr char kCacheMagic[4] = {'S', 'G', 'F', 'T'};
constexpr std::uint32_t kCacheVersion = 1;
} // namespace

void FeatureTable::write_cache(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out.write(kCacheMagic, 4);
    const std::uint32_t version = kCacheVersion;
    const std::uint64_t n = rows();
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(x_.data()),
              static_cast<std::streamsize>(x_.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(targets_.data()),
              static_cast<std::streamsize>(targets_.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(splits_.data()),
              static_cast<std::streamsize>(splits_.size()));
    if (!out) fail(ErrorKind::Io, "short write to " + path.string());
}

FeatureTable FeatureTable::read_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t n = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || std::memcmp(magic, kCacheMagic, 4) != 0)
        fail(ErrorKind::Schema, "not a feature cache: " + path.string());
    if (version != kCacheVersion)
        fail(ErrorKind::Schema, "unsupported feature cache version");

    FeatureTable table;
    table.x_.resize(n * kFeatures);
    table.targets_.resize(n);
    table.splits_.resize(n);
    in.read(reinterpret_cast<char*>(table.x_.data()),
            static_cast<std::streamsize>(table.x_.size() * sizeof(float)));
    in.read(reinterpret_cast<char*>(table.targets_.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    in.read(reinterpret_cast<char*>(table.splits_.data()), static_cast<std::streamsize>(n));
    if (!in) fail(ErrorKind::Schema, "truncated feature cache: " + path.string());
    for (Split s : table.splits_)
        if (s != Split::Train && s != Split::Heldout && s != Split::Test)
            fail(ErrorKind::Schema, "feature cache holds an invalid split label");
    for (float t : table.targets_)
        if (!(t >= 0.0f && t <= 1.0f))
            fail(ErrorKind::Validation, "feature cache target outside [0,1]");
    return table;
}

FeatureTable build_feature_table(const GeoRaster& sat, const BandSet& bands,
                                 const GeoRaster& truth, const GeoRaster& splits) {
    bands.validate(sat.bands());
    if (!sat.same_grid(truth) || !sat.same_grid(splits))
        fail(ErrorKind::Alignment, "satellite, truth and split rasters must share one grid");
    if (truth.bands() != 1 || splits.bands() != 1)
        fail(ErrorKind::Parameter, "truth and split rasters must be single-band");

    const auto order = bands.ordered();
    FeatureTable table;
    std::array<float, FeatureTable::kFeatures> row{};
    for (int r = 0; r < sat.height(); ++r) {
        for (int c = 0; c < sat.width(); ++c) {
            const float t = truth.at(0, r, c);
            if (truth.is_nodata(t)) continue;
            const float s = splits.at(0, r, c);
            if (splits.is_nodata(s)) continue;
            bool hole = false;
            for (std::size_t i = 0; i < row.size(); ++i) {
                row[i] = sat.at(order[i], r, c);
                if (sat.is_nodata(row[i])) {
                    hole = true;
                    break;
                }
            }
            if (hole) continue;
            if (s != 0.0f && s != 1.0f && s != 2.0f)
                fail(ErrorKind::Validation, "split raster holds a label outside {0,1,2}");
            table.add_row(row, t, static_cast<Split>(static_cast<std::uint8_t>(s)));
        }
    }
    return table;
}

} // namespace spraygrid
