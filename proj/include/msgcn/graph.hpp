#pragma once

#include <vector>

#include "msgcn/dense.hpp"
#include "msgcn/segmentation.hpp"

namespace msgcn {

// Symmetric sparse matrix: off-diagonal entries stored once with i < j,
// diagonal stored separately (empty means all-zero diagonal).
struct SparseSym {
    int n = 0;
    struct Entry {
        int i;
        int j;
        double w;
    };
    std::vector<Entry> entries;  // i < j
    std::vector<double> diag;    // size n or empty

    Matrix to_dense() const;
    // out = this * x
    Matrix apply(const Matrix& x) const;
};

// Per-scale graph: node features, similarity-weighted adjacency, and the
// renormalized propagation matrix used by every convolution layer.
struct ParcelGraph {
    int level_index = 0;
    Matrix features;       // N_l x C
    SparseSym adjacency;   // zero diagonal
    SparseSym propagation; // D~^{-1/2} (A+I) D~^{-1/2}
};

// A_ij = exp(-d(i,j)) * exp(-gamma * ||F_i - F_j||_2) on region-adjacent pairs,
// zero otherwise and on the diagonal. d is the centroid distance divided by
// the image diagonal length.
SparseSym adjacency_matrix(const SegmentationLevel& level, const Matrix& features,
                           double gamma);

// Renormalization trick: A~ = A + I, D~_ii = sum_j A~_ij,
// P = D~^{-1/2} A~ D~^{-1/2}.
SparseSym renormalize(const SparseSym& adjacency);

ParcelGraph build_parcel_graph(const SegmentationLevel& level, const Matrix& features,
                               double gamma, int level_index);

}  // namespace msgcn
