#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "msgcn/raster.hpp"

namespace msgcn {

struct Parcel {
    int id = 0;
    int area = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    std::vector<double> mean_spectrum;  // per stacked band
};

struct SegmentationLevel {
    double scale = 0.0;
    std::vector<Parcel> parcels;
    std::vector<int32_t> label_image;  // H*W row-major, parcel id per pixel
    int width = 0;
    int height = 0;

    int32_t label_at(int row, int col) const {
        return label_image[static_cast<size_t>(row) * width + col];
    }
};

struct SegmentationHierarchy {
    std::vector<SegmentationLevel> levels;  // fine to coarse
    // father_maps[l-1][finest_id] = parcel id at level l (levels indexed from 0;
    // entry 0 is the identity map for the finest level itself).
    std::vector<std::vector<int32_t>> father_maps;
};

// Baatz-Schaepe heterogeneity weights. Merge allowed while cost < scale^2.
struct HeterogeneityWeights {
    double color = 0.9;        // vs shape
    double compactness = 0.5;  // vs smoothness, within the shape term
};

// Internal merge state, exposed for the cost oracle in tests.
struct RegionStats {
    int area = 0;
    double perimeter = 0.0;
    int min_row = 0, max_row = 0, min_col = 0, max_col = 0;
    std::vector<double> sum;    // per band
    std::vector<double> sumsq;  // per band
};

// Heterogeneity increase of merging two regions sharing `shared_boundary`
// pixel edges. Symmetric and nonnegative.
double merge_cost(const RegionStats& a, const RegionStats& b, double shared_boundary,
                  const HeterogeneityWeights& weights);

SegmentationLevel fnea_segment(const RasterPair& pair, double scale,
                               const HeterogeneityWeights& weights = {},
                               uint64_t seed = 0);

SegmentationHierarchy build_hierarchy(const RasterPair& pair,
                                      const std::vector<double>& scales,
                                      const HeterogeneityWeights& weights = {},
                                      uint64_t seed = 0);

// All parcels sharing a 4-connected pixel boundary with `id`, excluding itself.
std::set<int32_t> neighbors(const SegmentationLevel& level, int32_t id);

// Full region adjacency: for every parcel, its neighbor set.
std::vector<std::set<int32_t>> adjacency_sets(const SegmentationLevel& level);

}  // namespace msgcn
