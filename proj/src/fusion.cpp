#include "msgcn/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace msgcn {

Matrix FusionMatrix::apply(const Matrix& coarse) const {
    if (coarse.rows != n_coarse)
        throw std::runtime_error("FusionMatrix::apply: shape mismatch");
    Matrix out(n_fine, coarse.cols);
    for (int i = 0; i < n_fine; ++i)
        for (int c = 0; c < coarse.cols; ++c)
            out(i, c) = weight[i] * coarse(father[i], c);
    return out;
}

Matrix FusionMatrix::apply_transposed(const Matrix& fine_grad) const {
    if (fine_grad.rows != n_fine)
        throw std::runtime_error("FusionMatrix::apply_transposed: shape mismatch");
    Matrix out(n_coarse, fine_grad.cols);
    for (int i = 0; i < n_fine; ++i)
        for (int c = 0; c < fine_grad.cols; ++c)
            out(father[i], c) += weight[i] * fine_grad(i, c);
    return out;
}

FusionMatrix fusion_matrix(const SegmentationHierarchy& hierarchy, int level_index,
                           double beta) {
    if (level_index < 1 || level_index >= static_cast<int>(hierarchy.levels.size()))
        throw std::runtime_error("fusion_matrix: level index out of range");
    if (beta <= 0.0) throw std::runtime_error("fusion_matrix: beta must be positive");

    const SegmentationLevel& fine = hierarchy.levels.front();
    const SegmentationLevel& coarse = hierarchy.levels[level_index];
    const auto& fathers = hierarchy.father_maps[level_index];
    if (fathers.size() != fine.parcels.size())
        throw std::runtime_error("fusion_matrix: missing father mapping");

    FusionMatrix t;
    t.n_fine = static_cast<int>(fine.parcels.size());
    t.n_coarse = static_cast<int>(coarse.parcels.size());
    t.father.resize(t.n_fine);
    t.weight.resize(t.n_fine);
    for (int i = 0; i < t.n_fine; ++i) {
        const int32_t j = fathers[i];
        const Parcel& child = fine.parcels[i];
        const Parcel& father = coarse.parcels[j];
        double dist = 0.0;
        for (size_t b = 0; b < child.mean_spectrum.size(); ++b) {
            const double diff = child.mean_spectrum[b] - father.mean_spectrum[b];
            dist += diff * diff;
        }
        t.father[i] = j;
        t.weight[i] = (static_cast<double>(child.area) / father.area) *
                      std::exp(-beta * std::sqrt(dist));
    }
    return t;
}

Matrix fuse_outputs(const std::vector<Matrix>& outputs,
                    const std::vector<FusionMatrix>& fusions) {
    if (outputs.empty()) throw std::runtime_error("fuse_outputs: no channel outputs");
    if (fusions.size() + 1 != outputs.size())
        throw std::runtime_error("fuse_outputs: fusion/output count mismatch");

    Matrix fused = outputs.front();
    for (size_t l = 1; l < outputs.size(); ++l) {
        const Matrix mapped = fusions[l - 1].apply(outputs[l]);
        if (mapped.rows != fused.rows || mapped.cols != fused.cols)
            throw std::runtime_error("fuse_outputs: shape mismatch");
        for (size_t i = 0; i < fused.d.size(); ++i) fused.d[i] += mapped.d[i];
    }
    return fused;
}

std::vector<uint8_t> assign_labels(const Matrix& fused) {
    std::vector<uint8_t> labels(fused.rows);
    for (int i = 0; i < fused.rows; ++i)
        labels[i] = fused(i, 1) >= fused(i, 0) ? 1 : 0;  // tie -> changed
    return labels;
}

ChangeMap render_map(const std::vector<uint8_t>& node_labels,
                     const SegmentationLevel& finest) {
    if (node_labels.size() != finest.parcels.size())
        throw std::runtime_error("render_map: label count mismatch");
    ChangeMap map;
    map.width = finest.width;
    map.height = finest.height;
    map.labels.resize(finest.label_image.size());
    for (size_t p = 0; p < finest.label_image.size(); ++p)
        map.labels[p] = node_labels[finest.label_image[p]];
    map.node_labels = node_labels;
    return map;
}

}  // namespace msgcn
