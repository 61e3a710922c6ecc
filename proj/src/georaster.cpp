#include "spraygrid/georaster.hpp"

#include <algorithm>
#include <set>

namespace spraygrid {

const char* dtype_name(DType t) {
    return t == DType::U8 ? "u8" : "f32";
}

DType dtype_from_name(const std::string& name) {
    if (name == "u8") return DType::U8;
    if (name == "f32") return DType::F32;
    fail(ErrorKind::Schema, "unknown dtype '" + name + "' (expected u8 or f32)");
}

GeoRaster::GeoRaster(int width, int height, int bands, DType dtype, GeoTransform transform,
                     std::string crs, std::optional<double> nodata, float fill)
    : width_(width),
      height_(height),
      bands_(bands),
      dtype_(dtype),
      transform_(transform),
      crs_(std::move(crs)),
      nodata_(nodata) {
    if (width <= 0 || height <= 0 || bands < 1)
        fail(ErrorKind::Parameter, "raster dimensions must be positive");
    if (!transform_.valid())
        fail(ErrorKind::Parameter, "pixel sizes must be positive");
    data_.assign(static_cast<std::size_t>(width_) * height_ * bands_, fill);
}

void GeoRaster::set_band_names(std::vector<std::string> names) {
    if (!names.empty() && names.size() != static_cast<std::size_t>(bands_))
        fail(ErrorKind::Parameter, "band_names must match the band count");
    band_names_ = std::move(names);
}

bool GeoRaster::same_grid(const GeoRaster& o, double tol) const {
    return width_ == o.width_ && height_ == o.height_ &&
           transform_.approx_equal(o.transform_, tol);
}

bool GeoRaster::is_binary() const {
    for (float v : data_) {
        if (is_nodata(v)) continue;
        if (v != 0.0f && v != 1.0f) return false;
    }
    return true;
}

const std::array<std::string, BandSet::kCount>& BandSet::role_names() {
    static const std::array<std::string, kCount> names = {
        "b", "g", "r", "nir", "vre1", "vre2", "vre3", "nnir", "swir1", "swir2"};
    return names;
}

int BandSet::index_of(const std::string& role) const {
    if (role == "b" || role == "blue") return blue;
    if (role == "g" || role == "green") return green;
    if (role == "r" || role == "red") return red;
    if (role == "nir") return nir;
    if (role == "vre1") return vre1;
    if (role == "vre2") return vre2;
    if (role == "vre3") return vre3;
    if (role == "nnir") return nnir;
    if (role == "swir1") return swir1;
    if (role == "swir2") return swir2;
    fail(ErrorKind::Parameter, "unknown band role '" + role + "'");
}

void BandSet::validate(int available_bands) const {
    const auto idx = ordered();
    std::set<int> distinct(idx.begin(), idx.end());
    if (distinct.size() != idx.size())
        fail(ErrorKind::Parameter, "band set indices must be distinct");
    for (int i : idx)
        if (i < 0 || i >= available_bands)
            fail(ErrorKind::Parameter, "band index out of range for this raster");
}

BandSet BandSet::from_band_names(const std::vector<std::string>& names) {
    BandSet bs;
    auto find = [&](const std::string& role) {
        auto it = std::find(names.begin(), names.end(), role);
        if (it == names.end())
            fail(ErrorKind::Parameter, "raster has no band named '" + role + "'");
        return static_cast<int>(it - names.begin());
    };
    bs.blue = find("b");
    bs.green = find("g");
    bs.red = find("r");
    bs.nir = find("nir");
    bs.vre1 = find("vre1");
    bs.vre2 = find("vre2");
    bs.vre3 = find("vre3");
    bs.nnir = find("nnir");
    bs.swir1 = find("swir1");
    bs.swir2 = find("swir2");
    return bs;
}

} // namespace spraygrid
