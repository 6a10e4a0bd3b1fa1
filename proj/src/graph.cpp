#include "msgcn/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace msgcn {

Matrix SparseSym::to_dense() const {
    Matrix m(n, n);
    if (!diag.empty())
        for (int i = 0; i < n; ++i) m(i, i) = diag[i];
    for (const Entry& e : entries) {
        m(e.i, e.j) = e.w;
        m(e.j, e.i) = e.w;
    }
    return m;
}

Matrix SparseSym::apply(const Matrix& x) const {
    if (x.rows != n) throw std::runtime_error("SparseSym::apply: dimension mismatch");
    Matrix out(n, x.cols);
    if (!diag.empty())
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < x.cols; ++c) out(i, c) = diag[i] * x(i, c);
    for (const Entry& e : entries) {
        for (int c = 0; c < x.cols; ++c) {
            out(e.i, c) += e.w * x(e.j, c);
            out(e.j, c) += e.w * x(e.i, c);
        }
    }
    return out;
}

SparseSym adjacency_matrix(const SegmentationLevel& level, const Matrix& features,
                           double gamma) {
    if (features.rows != static_cast<int>(level.parcels.size()))
        throw std::runtime_error("adjacency_matrix: feature row count mismatch");
    if (gamma <= 0.0) throw std::runtime_error("adjacency_matrix: gamma must be positive");

    const double diagonal =
        std::hypot(static_cast<double>(level.width), static_cast<double>(level.height));

    SparseSym a;
    a.n = features.rows;
    const auto adj = adjacency_sets(level);
    for (int i = 0; i < a.n; ++i) {
        for (int32_t j : adj[i]) {
            if (j <= i) continue;
            const Parcel& pi = level.parcels[i];
            const Parcel& pj = level.parcels[j];
            const double d = std::hypot(pi.centroid_row - pj.centroid_row,
                                        pi.centroid_col - pj.centroid_col) /
                             diagonal;
            double fdist = 0.0;
            for (int c = 0; c < features.cols; ++c) {
                const double diff = features(i, c) - features(j, c);
                fdist += diff * diff;
            }
            fdist = std::sqrt(fdist);
            a.entries.push_back({i, j, std::exp(-d) * std::exp(-gamma * fdist)});
        }
    }
    return a;
}

SparseSym renormalize(const SparseSym& adjacency) {
    std::vector<double> degree(adjacency.n, 1.0);  // self-loop
    for (const auto& e : adjacency.entries) {
        degree[e.i] += e.w;
        degree[e.j] += e.w;
    }

    SparseSym p;
    p.n = adjacency.n;
    p.diag.resize(p.n);
    for (int i = 0; i < p.n; ++i) p.diag[i] = 1.0 / degree[i];
    p.entries.reserve(adjacency.entries.size());
    for (const auto& e : adjacency.entries)
        p.entries.push_back({e.i, e.j, e.w / std::sqrt(degree[e.i] * degree[e.j])});
    return p;
}

ParcelGraph build_parcel_graph(const SegmentationLevel& level, const Matrix& features,
                               double gamma, int level_index) {
    ParcelGraph g;
    g.level_index = level_index;
    g.features = features;
    g.adjacency = adjacency_matrix(level, features, gamma);
    g.propagation = renormalize(g.adjacency);
    return g;
}

}  // namespace msgcn
