#include "spraygrid/png_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include <json.hpp>
#include <png.h>

namespace spraygrid {

using nlohmann::json;

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& png_path) {
    return std::filesystem::path(png_path.string() + ".json");
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_sidecar(const GeoRaster& raster, const std::filesystem::path& png_path) {
    json j;
    const GeoTransform& tf = raster.transform();
    j["width"] = raster.width();
    j["height"] = raster.height();
    j["transform"] = {tf.origin_x, tf.pixel_w, 0.0, tf.origin_y, 0.0, -tf.pixel_h};
    j["crs"] = raster.crs();
    std::ofstream out(sidecar_path(png_path));
    if (!out) fail(ErrorKind::Io, "cannot write " + sidecar_path(png_path).string());
    out << j.dump(2) << '\n';
}

void read_sidecar(GeoTransform& tf, std::string& crs, const std::filesystem::path& png_path) {
    const auto path = sidecar_path(png_path);
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "missing PNG sidecar " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Schema, "invalid JSON in " + path.string());
    const auto& t = j.at("transform");
    if (!t.is_array() || t.size() != 6)
        fail(ErrorKind::Schema, "PNG sidecar transform must be a 6-element array");
    tf.origin_x = t[0].get<double>();
    tf.pixel_w = t[1].get<double>();
    tf.origin_y = t[3].get<double>();
    tf.pixel_h = -t[5].get<double>();
    if (!tf.valid()) fail(ErrorKind::Schema, "PNG sidecar pixel sizes must be positive");
    crs = j.value("crs", std::string());
}

// Reads an 8-bit PNG into packed bytes, channels per pixel returned.
void read_png_bytes(const std::filesystem::path& path, int expect_channels,
                    std::vector<std::uint8_t>& bytes, int& width, int& height) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) fail(ErrorKind::Io, "cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Io, "libpng initialization failed");
    }

    volatile bool bad_format = false;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Schema, "not a valid PNG file: " + path.string());
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    const int want_color = expect_channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    if (depth != 8 || color != want_color) bad_format = true;

    if (!bad_format) {
        const int passes = png_set_interlace_handling(png);
        (void)passes;
        png_read_update_info(png, info);
        bytes.assign(static_cast<std::size_t>(width) * height * expect_channels, 0);
        row_ptrs.resize(height);
        for (int r = 0; r < height; ++r)
            row_ptrs[r] = bytes.data() + static_cast<std::size_t>(r) * width * expect_channels;
        png_read_image(png, row_ptrs.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (bad_format)
        fail(ErrorKind::Schema,
             "expected an 8-bit " + std::string(expect_channels == 1 ? "grayscale" : "RGB") +
                 " PNG: " + path.string());
}

void write_png_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes,
                     int width, int height, int channels) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file) fail(ErrorKind::Io, "cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Io, "libpng initialization failed");
    }

    std::vector<png_bytep> row_ptrs(height);
    for (int r = 0; r < height; ++r)
        row_ptrs[r] = const_cast<png_bytep>(bytes.data()) +
                      static_cast<std::size_t>(r) * width * channels;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Io, "PNG write failed: " + path.string());
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

GeoRaster read_mask_png(const std::filesystem::path& png_path) {
    std::vector<std::uint8_t> bytes;
    int width = 0, height = 0;
    read_png_bytes(png_path, 1, bytes, width, height);

    GeoTransform tf;
    std::string crs;
    read_sidecar(tf, crs, png_path);

    GeoRaster mask(width, height, 1, DType::U8, tf, crs);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] == 0)
            mask.data()[i] = 0.0f;
        else if (bytes[i] == 255)
            mask.data()[i] = 1.0f;
        else
            fail(ErrorKind::Validation,
                 "mask PNG must hold only 0 (crop) and 255 (weed): " + png_path.string());
    }
    return mask;
}

void write_mask_png(const GeoRaster& mask, const std::filesystem::path& png_path) {
    if (mask.bands() != 1)
        fail(ErrorKind::Parameter, "mask PNG export needs a single-band raster");
    std::vector<std::uint8_t> bytes(mask.pixels());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const float v = mask.data()[i];
        if (v == 0.0f)
            bytes[i] = 0;
        else if (v == 1.0f)
            bytes[i] = 255;
        else
            fail(ErrorKind::Validation, "mask raster must be binary {0,1} for PNG export");
    }
    write_png_bytes(png_path, bytes, mask.width(), mask.height(), 1);
    write_sidecar(mask, png_path);
}

void write_rgb_png(const GeoRaster& rgb, const std::filesystem::path& png_path) {
    if (rgb.bands() != 3 || rgb.dtype() != DType::U8)
        fail(ErrorKind::Parameter, "RGB PNG export needs a 3-band u8 raster");
    const int w = rgb.width(), h = rgb.height();
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int b = 0; b < 3; ++b) {
                const float v = rgb.at(b, r, c);
                bytes[(static_cast<std::size_t>(r) * w + c) * 3 + b] =
                    static_cast<std::uint8_t>(v);
            }
    write_png_bytes(png_path, bytes, w, h, 3);
    write_sidecar(rgb, png_path);
}

} // namespace spraygrid
