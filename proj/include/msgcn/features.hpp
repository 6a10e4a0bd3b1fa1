#pragma once

#include "msgcn/dense.hpp"
#include "msgcn/raster.hpp"
#include "msgcn/segmentation.hpp"

namespace msgcn {

// Dependency-free stand-in for a learned feature extractor: per stacked band
// emits identity, Gaussian blur at two radii, gradient magnitude, and local
// standard deviation; per matched band pair of the two dates it adds the
// temporal difference magnitude, raw and smoothed. Each channel is min-max
// normalized to [0,1]. C = 5 * stacked bands + 2 * matched band pairs.
FeatureMaps filter_bank_features(const RasterPair& pair);

// Mean pooling: row i, column n = mean of channel n over the pixels of
// parcel i.
Matrix pool_object_features(const FeatureMaps& maps, const SegmentationLevel& level);

// In-place per-column standardization to zero mean and unit variance
// (constant columns are only centered). Centering the pooled features keeps
// plain gradient descent well conditioned in a bias-free network; without it
// the all-positive pooled features make labeled-node gradients nearly cancel.
void standardize_columns(Matrix& features);

}  // namespace msgcn
