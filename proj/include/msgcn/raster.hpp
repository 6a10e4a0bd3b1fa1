#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace msgcn {

// Multi-band image, row-major per band: data[b*W*H + r*W + c].
struct Raster {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::vector<double> data;

    double at(int band, int row, int col) const {
        return data[static_cast<size_t>(band) * width * height +
                    static_cast<size_t>(row) * width + col];
    }
    double& at(int band, int row, int col) {
        return data[static_cast<size_t>(band) * width * height +
                    static_cast<size_t>(row) * width + col];
    }
    size_t plane_size() const { return static_cast<size_t>(width) * height; }
};

struct RasterPair {
    Raster t1;
    Raster t2;
    Raster stacked;
};

// C planes of size H x W, plane-major like Raster.
struct FeatureMaps {
    int channels = 0;
    int width = 0;
    int height = 0;
    std::vector<double> data;

    double at(int ch, int row, int col) const {
        return data[static_cast<size_t>(ch) * width * height +
                    static_cast<size_t>(row) * width + col];
    }
    double& at(int ch, int row, int col) {
        return data[static_cast<size_t>(ch) * width * height +
                    static_cast<size_t>(row) * width + col];
    }
};

struct ChangeMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> labels;           // per pixel, 0 unchanged / 1 changed
    std::vector<uint8_t> node_labels;      // per finest parcel, may be empty

    uint8_t at(int row, int col) const {
        return labels[static_cast<size_t>(row) * width + col];
    }
};

enum class RasterFormat { Pgm, Png, RawF32, Auto };

// Integer formats are scaled to [0,1] by the max representable value.
Raster load_raster(const std::string& path, RasterFormat format = RasterFormat::Auto);

RasterPair stack_pair(const Raster& t1, const Raster& t2);

// PGM P5, changed=255, unchanged=0. Byte output is deterministic.
void write_change_map(const ChangeMap& map, const std::string& path);
ChangeMap read_change_map(const std::string& path);

// Raw tensor format: 16-byte header "MSF0" + u32 C,H,W (little endian), then
// C*H*W little-endian float32, plane-major.
FeatureMaps load_feature_maps(const std::string& path, int expect_c, int expect_h,
                              int expect_w);
void write_feature_maps(const FeatureMaps& maps, const std::string& path);

void write_pgm(const Raster& raster, const std::string& path);  // single band, 8-bit

void validate(const Raster& raster);

}  // namespace msgcn
