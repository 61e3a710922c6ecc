#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "spraygrid/georaster.hpp"
#include "spraygrid/softmask.hpp"

namespace spraygrid {

// Plain regression view: row-major features plus targets. The generic
// regressors work on this; FeatureTable is the 10-band production carrier.
struct Dataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> x; // rows * cols
    std::vector<float> y; // rows

    std::span<const float> row(std::size_t i) const {
        return std::span<const float>(x.data() + i * cols, cols);
    }
};

// Per-pixel samples: 10 reflectance values in BandSet order, a weed-fraction
// target in [0,1], and a split label. No nodata rows.
class FeatureTable {
public:
    static constexpr std::size_t kFeatures = 10;

    std::size_t rows() const { return targets_.size(); }

    std::span<const float> features(std::size_t i) const {
        return std::span<const float>(x_.data() + i * kFeatures, kFeatures);
    }
    float target(std::size_t i) const { return targets_[i]; }
    Split split(std::size_t i) const { return splits_[i]; }

    const std::vector<float>& feature_data() const { return x_; }
    const std::vector<float>& targets() const { return targets_; }
    const std::vector<Split>& splits() const { return splits_; }

    void add_row(std::span<const float> features, float target, Split split);

    std::size_t count(Split s) const;

    // Materializes the rows of one split.
    Dataset dataset(Split s) const;
    Dataset dataset_all() const;

    // CSV with header b,g,r,nir,vre1,vre2,vre3,nnir,swir1,swir2,target,split.
    void write_csv(const std::filesystem::path& path) const;
    static FeatureTable read_csv(const std::filesystem::path& path);

    // Binary cache, much faster to reload than CSV.
    void write_cache(const std::filesystem::path& path) const;
    static FeatureTable read_cache(const std::filesystem::path& path);

private:
    std::vector<float> x_;
    std::vector<float> targets_;
    std::vector<Split> splits_;
};

// Builds the table from a 10-band satellite raster, a fraction-mask target
// and a split-label raster on the same grid, walking pixels in row-major
// order and skipping any pixel with nodata in any input.
FeatureTable build_feature_table(const GeoRaster& sat, const BandSet& bands,
                                 const GeoRaster& truth, const GeoRaster& splits);

} // namespace spraygrid
