#include "spraygrid/grf.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "spraygrid/png_io.hpp"

namespace spraygrid {

using nlohmann::json;

std::filesystem::path grf_bin_path(const std::filesystem::path& sidecar_path) {
    std::filesystem::path p = sidecar_path;
    p.replace_extension(".bin");
    return p;
}

namespace {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Schema, "invalid JSON in " + path.string());
    return j;
}

} // namespace

GeoRaster read_grf(const std::filesystem::path& sidecar_path) {
    const json j = read_json_file(sidecar_path);
    for (const char* key : {"width", "height", "bands", "dtype", "transform", "crs"})
        if (!j.contains(key))
            fail(ErrorKind::Schema, std::string("GRF sidecar missing '") + key + "': " +
                                        sidecar_path.string());

    const int width = j.at("width").get<int>();
    const int height = j.at("height").get<int>();
    const int bands = j.at("bands").get<int>();
    const DType dtype = dtype_from_name(j.at("dtype").get<std::string>());

    const auto& t = j.at("transform");
    if (!t.is_array() || t.size() != 6)
        fail(ErrorKind::Schema, "GRF transform must be a 6-element array");
    GeoTransform tf;
    tf.origin_x = t[0].get<double>();
    tf.pixel_w = t[1].get<double>();
    tf.origin_y = t[3].get<double>();
    tf.pixel_h = -t[5].get<double>();
    if (t[2].get<double>() != 0.0 || t[4].get<double>() != 0.0)
        fail(ErrorKind::Schema, "rotated geotransforms are not supported");
    if (!tf.valid())
        fail(ErrorKind::Schema, "GRF pixel sizes must be positive (north-up grid)");

    std::optional<double> nodata;
    if (j.contains("nodata") && !j.at("nodata").is_null())
        nodata = j.at("nodata").get<double>();

    GeoRaster raster(width, height, bands, dtype, tf, j.at("crs").get<std::string>(), nodata);
    if (j.contains("band_names") && !j.at("band_names").is_null())
        raster.set_band_names(j.at("band_names").get<std::vector<std::string>>());

    const auto bin_path = grf_bin_path(sidecar_path);
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) fail(ErrorKind::Io, "cannot open " + bin_path.string());

    const std::size_t n = raster.size();
    if (dtype == DType::F32) {
        static_assert(sizeof(float) == 4);
        bin.read(reinterpret_cast<char*>(raster.data().data()),
                 static_cast<std::streamsize>(n * 4));
    } else {
        std::vector<std::uint8_t> bytes(n);
        bin.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
        for (std::size_t i = 0; i < n; ++i) raster.data()[i] = static_cast<float>(bytes[i]);
    }
    if (!bin)
        fail(ErrorKind::Schema, "binary payload shorter than width*height*bands: " +
                                    bin_path.string());
    char extra;
    if (bin.read(&extra, 1))
        fail(ErrorKind::Schema, "binary payload longer than width*height*bands: " +
                                    bin_path.string());
    return raster;
}

void write_grf(const GeoRaster& raster, const std::filesystem::path& sidecar_path) {
    json j;
    j["width"] = raster.width();
    j["height"] = raster.height();
    j["bands"] = raster.bands();
    j["dtype"] = dtype_name(raster.dtype());
    const GeoTransform& tf = raster.transform();
    j["transform"] = {tf.origin_x, tf.pixel_w, 0.0, tf.origin_y, 0.0, -tf.pixel_h};
    j["crs"] = raster.crs();
    if (raster.nodata())
        j["nodata"] = *raster.nodata();
    else
        j["nodata"] = nullptr;
    j["band_names"] = raster.band_names();

    if (sidecar_path.has_parent_path())
        std::filesystem::create_directories(sidecar_path.parent_path());
    {
        std::ofstream out(sidecar_path);
        if (!out) fail(ErrorKind::Io, "cannot write " + sidecar_path.string());
        out << j.dump(2) << '\n';
    }

    const auto bin_path = grf_bin_path(sidecar_path);
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) fail(ErrorKind::Io, "cannot write " + bin_path.string());
    if (raster.dtype() == DType::F32) {
        bin.write(reinterpret_cast<const char*>(raster.data().data()),
                  static_cast<std::streamsize>(raster.size() * 4));
    } else {
        std::vector<std::uint8_t> bytes(raster.size());
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            const float v = raster.data()[i];
            if (v < 0.0f || v > 255.0f || v != std::floor(v))
                fail(ErrorKind::Validation, "u8 raster holds a value outside 0..255");
            bytes[i] = static_cast<std::uint8_t>(v);
        }
        bin.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
    if (!bin) fail(ErrorKind::Io, "short write to " + bin_path.string());
}

GeoRaster read_raster(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".grf") return read_grf(path);
    if (ext == ".png") return read_mask_png(path);
    fail(ErrorKind::Parameter, "unsupported raster container '" + ext +
                                   "' (expected .grf or .png): " + path.string());
}

} // namespace spraygrid
