#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spraygrid/georaster.hpp"
#include "spraygrid/rng.hpp"

namespace testutil {

// Scratch directory removed when the test ends.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        dir_ = std::filesystem::temp_directory_path() /
               ("spraygrid_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() { std::filesystem::remove_all(dir_); }
    const std::filesystem::path& path() const { return dir_; }
    std::filesystem::path operator/(const std::string& name) const { return dir_ / name; }

private:
    std::filesystem::path dir_;
};

inline spraygrid::GeoRaster make_raster(int width, int height, const std::vector<float>& values,
                                        double pixel = 1.0, double ox = 0.0, double oy = 0.0,
                                        const std::string& crs = "test-crs") {
    spraygrid::GeoRaster r(width, height, 1, spraygrid::DType::F32,
                           {ox, oy == 0.0 ? height * pixel : oy, pixel, pixel}, crs);
    r.data() = values;
    return r;
}

inline spraygrid::GeoRaster random_binary(int width, int height, double p_weed,
                                          std::uint64_t seed, double pixel = 1.0) {
    spraygrid::GeoRaster r(width, height, 1, spraygrid::DType::U8,
                           {0.0, height * pixel, pixel, pixel}, "test-crs");
    spraygrid::Rng rng(seed);
    for (auto& v : r.data()) v = rng.uniform() < p_weed ? 1.0f : 0.0f;
    return r;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace testutil
