#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "msgcn/raster.hpp"

namespace msgcn {

struct Polygon {
    std::vector<std::pair<double, double>> vertices;  // (row, col), closed implicitly
};

struct SceneSpec {
    int width = 64;
    int height = 64;
    double background_mean = 0.4;
    double texture_amplitude = 0.08;  // smooth low-frequency variation
    double patch_amplitude = 0.2;     // per-cell offsets of each blocky field
    int patch_size = 4;               // cell edge length in pixels
    double change_shift = 0.5;        // mean shift inside change polygons
    double noise_sigma = 0.05;
    std::vector<Polygon> polygons;
};

struct SyntheticScene {
    Raster t1;
    Raster t2;
    ChangeMap reference;
};

// t1 = textured background + noise; the background is a sum of smooth
// sinusoids and a blocky random patch field, so parcels form at several
// scales. t2 = same background with polygon
// interiors shifted by change_shift, + independent noise. Reference marks
// exactly the polygon pixels. Throws if a polygon leaves the image.
SyntheticScene generate_synthetic_pair(const SceneSpec& spec, uint64_t seed);

// Three rectangles of mixed sizes placed deterministically for the given
// image size; the default desk-scale scene.
SceneSpec default_scene(int width, int height, double noise_sigma);

bool point_in_polygon(const Polygon& poly, double row, double col);

}  // namespace msgcn
