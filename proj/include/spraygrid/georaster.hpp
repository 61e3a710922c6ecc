#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spraygrid/errors.hpp"
#include "spraygrid/geotransform.hpp"

namespace spraygrid {

enum class DType : std::uint8_t { U8, F32 };

const char* dtype_name(DType t);
DType dtype_from_name(const std::string& name);

// N-band gridded array with georeferencing. Values are held as f32 in memory
// regardless of dtype; dtype controls the on-disk encoding (u8 values 0..255
// are exactly representable, so round-trips stay byte-exact). Storage is
// band-sequential, row-major within a band. Rasters are immutable once built
// by the pipeline operations; everything downstream treats them as values.
class GeoRaster {
public:
    GeoRaster() = default;
    GeoRaster(int width, int height, int bands, DType dtype, GeoTransform transform,
              std::string crs, std::optional<double> nodata = std::nullopt,
              float fill = 0.0f);

    int width() const { return width_; }
    int height() const { return height_; }
    int bands() const { return bands_; }
    DType dtype() const { return dtype_; }
    const GeoTransform& transform() const { return transform_; }
    const std::string& crs() const { return crs_; }
    std::optional<double> nodata() const { return nodata_; }

    std::size_t size() const { return data_.size(); }
    std::size_t pixels() const { return static_cast<std::size_t>(width_) * height_; }

    std::size_t index(int band, int row, int col) const {
        return (static_cast<std::size_t>(band) * height_ + row) * width_ + col;
    }
    float at(int band, int row, int col) const { return data_[index(band, row, col)]; }
    float& at(int band, int row, int col) { return data_[index(band, row, col)]; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    bool is_nodata(float v) const {
        return nodata_ && static_cast<double>(v) == *nodata_;
    }
    float nodata_value() const { return static_cast<float>(*nodata_); }

    double pixel_area() const { return transform_.pixel_w * transform_.pixel_h; }

    // Band names are optional; when present there is one per band.
    const std::vector<std::string>& band_names() const { return band_names_; }
    void set_band_names(std::vector<std::string> names);

    void set_nodata(std::optional<double> v) { nodata_ = v; }

    // Grid identity: same dims and transform (within tolerance). CRS compared
    // separately where it matters.
    bool same_grid(const GeoRaster& o, double tol = 1e-6) const;

    // True when every value of every band is 0 or 1 (u8 255 convention is
    // normalized by the loaders before this is asked).
    bool is_binary() const;

private:
    int width_ = 0, height_ = 0, bands_ = 0;
    DType dtype_ = DType::F32;
    GeoTransform transform_;
    std::string crs_;
    std::optional<double> nodata_;
    std::vector<float> data_;
    std::vector<std::string> band_names_;
};

// Named roles of the 10-band satellite stack mapped to band indices. The
// role order below is the feature-vector order everywhere in the pipeline:
// blue, green, red, nir at 10 m native; vre1..3, nnir, swir1, swir2 resampled
// from 20 m.
struct BandSet {
    int blue = 0, green = 1, red = 2, nir = 3;
    int vre1 = 4, vre2 = 5, vre3 = 6, nnir = 7, swir1 = 8, swir2 = 9;

    static constexpr int kCount = 10;

    // Short role names, also the feature CSV column headers.
    static const std::array<std::string, kCount>& role_names();

    std::array<int, kCount> ordered() const {
        return {blue, green, red, nir, vre1, vre2, vre3, nnir, swir1, swir2};
    }

    int index_of(const std::string& role) const;

    // Exactly 10 distinct in-range indices.
    void validate(int available_bands) const;

    // Build from a raster's band_names when they use the role names.
    static BandSet from_band_names(const std::vector<std::string>& names);
};

} // namespace spraygrid
