#pragma once

#include <vector>

#include "msgcn/dense.hpp"
#include "msgcn/segmentation.hpp"

namespace msgcn {

// Sparse N_1 x N_l child-to-father map: one nonzero per row, at the father's
// column, weight = area ratio * exp(-beta * spectral distance).
struct FusionMatrix {
    int n_fine = 0;
    int n_coarse = 0;
    std::vector<int32_t> father;   // per fine node
    std::vector<double> weight;    // per fine node, in (0,1]

    // T * O  (N_1 x F)
    Matrix apply(const Matrix& coarse) const;
    // T^T * G  (N_l x F)
    Matrix apply_transposed(const Matrix& fine_grad) const;
};

// level_index counts from 0 (finest); requires level_index >= 1.
FusionMatrix fusion_matrix(const SegmentationHierarchy& hierarchy, int level_index,
                           double beta);

// E = O_1 + T_2 O_2 + ... + T_L O_L. fusions[k] pairs with outputs[k+1].
Matrix fuse_outputs(const std::vector<Matrix>& outputs,
                    const std::vector<FusionMatrix>& fusions);

// argmax per row; tie goes to changed (class 1).
std::vector<uint8_t> assign_labels(const Matrix& fused);

ChangeMap render_map(const std::vector<uint8_t>& node_labels,
                     const SegmentationLevel& finest);

}  // namespace msgcn
