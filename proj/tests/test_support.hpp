// Shared helpers for unit and acceptance tests: independent dense oracles
// (Eigen-based), finite-difference gradients, and synthetic instances. These
// deliberately avoid the library's sparse code paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "msgcn/fusion.hpp"
#include "msgcn/gcn.hpp"
#include "msgcn/graph.hpp"
#include "msgcn/raster.hpp"
#include "msgcn/segmentation.hpp"

namespace testsupport {

using Eigen::MatrixXd;

inline MatrixXd to_eigen(const msgcn::Matrix& m) {
    MatrixXd out(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
    return out;
}

// Dense adjacency straight from the entry list, bypassing SparseSym::to_dense.
inline MatrixXd dense_adjacency(const msgcn::SparseSym& a) {
    MatrixXd m = MatrixXd::Zero(a.n, a.n);
    if (!a.diag.empty())
        for (int i = 0; i < a.n; ++i) m(i, i) = a.diag[i];
    for (const auto& e : a.entries) {
        m(e.i, e.j) = e.w;
        m(e.j, e.i) = e.w;
    }
    return m;
}

// Renormalization recomputed densely: P = D~^{-1/2} (A+I) D~^{-1/2}.
inline MatrixXd dense_propagation(const msgcn::SparseSym& adjacency) {
    MatrixXd at = dense_adjacency(adjacency) + MatrixXd::Identity(adjacency.n, adjacency.n);
    Eigen::VectorXd dinv = at.rowwise().sum().array().rsqrt();
    return dinv.asDiagonal() * at * dinv.asDiagonal();
}

inline MatrixXd dense_softmax_rows(const MatrixXd& logits) {
    MatrixXd out(logits.rows(), logits.cols());
    for (int i = 0; i < logits.rows(); ++i) {
        Eigen::RowVectorXd row = logits.row(i);
        row.array() -= row.maxCoeff();
        Eigen::RowVectorXd e = row.array().exp();
        out.row(i) = e / e.sum();
    }
    return out;
}

// Straight-line dense recomputation of one channel forward pass (eval mode).
inline MatrixXd dense_channel_forward(const msgcn::ParcelGraph& graph,
                                      const std::vector<msgcn::Matrix>& weights) {
    const MatrixXd p = dense_propagation(graph.adjacency);
    MatrixXd h = to_eigen(graph.features);
    for (size_t k = 0; k < weights.size(); ++k) {
        MatrixXd a = p * h * to_eigen(weights[k]);
        if (k + 1 == weights.size()) return dense_softmax_rows(a);
        h = a.cwiseMax(0.0);
    }
    return h;
}

inline MatrixXd dense_fusion(const msgcn::FusionMatrix& t) {
    MatrixXd m = MatrixXd::Zero(t.n_fine, t.n_coarse);
    for (int i = 0; i < t.n_fine; ++i) m(i, t.father[i]) = t.weight[i];
    return m;
}

// Random node-classification instance with no segmentation behind it.
inline msgcn::ParcelGraph random_graph(int n, int feature_dim, std::mt19937_64& rng,
                                       double edge_prob = 0.5) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    msgcn::ParcelGraph g;
    g.features = msgcn::Matrix(n, feature_dim);
    for (double& v : g.features.d) v = unif(rng);
    g.adjacency.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unif(rng) < edge_prob)
                g.adjacency.entries.push_back({i, j, 0.1 + 0.9 * unif(rng)});
    g.propagation = msgcn::renormalize(g.adjacency);
    return g;
}

// Fusion matrix mapping n_fine children onto n_coarse fathers round-robin.
inline msgcn::FusionMatrix random_fusion(int n_fine, int n_coarse,
                                         std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    msgcn::FusionMatrix t;
    t.n_fine = n_fine;
    t.n_coarse = n_coarse;
    for (int i = 0; i < n_fine; ++i) {
        t.father.push_back(i % n_coarse);
        t.weight.push_back(unif(rng));
    }
    return t;
}

// Training objective in eval mode: fused cross-entropy + L2 weight decay.
inline double objective(const msgcn::GcnModel& model,
                        const std::vector<msgcn::ParcelGraph>& graphs,
                        const std::vector<msgcn::FusionMatrix>& fusions,
                        const msgcn::LabelSet& labels) {
    const msgcn::Matrix fused = msgcn::evaluate(model, graphs, fusions);
    double obj = msgcn::fused_loss(fused, labels);
    for (const auto& channel : model.channels)
        for (const auto& w : channel)
            for (double v : w.d) obj += 0.5 * model.hp.weight_decay * v * v;
    return obj;
}

// Central finite difference of the objective with respect to one weight entry.
inline double fd_gradient(msgcn::GcnModel& model,
                          const std::vector<msgcn::ParcelGraph>& graphs,
                          const std::vector<msgcn::FusionMatrix>& fusions,
                          const msgcn::LabelSet& labels, size_t channel, size_t layer,
                          size_t entry, double h = 1e-5) {
    double& w = model.channels[channel][layer].d[entry];
    const double saved = w;
    w = saved + h;
    const double up = objective(model, graphs, fusions, labels);
    w = saved - h;
    const double down = objective(model, graphs, fusions, labels);
    w = saved;
    return (up - down) / (2.0 * h);
}

inline double rel_error(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / scale;
}

// Maximum relative error between analytic and finite-difference gradients
// over every weight entry of the model.
inline double max_gradient_error(msgcn::GcnModel& model,
                                 const std::vector<msgcn::ParcelGraph>& graphs,
                                 const std::vector<msgcn::FusionMatrix>& fusions,
                                 const msgcn::LabelSet& labels) {
    std::vector<msgcn::ChannelCache> caches;
    std::vector<msgcn::Matrix> outputs;
    for (size_t l = 0; l < model.channels.size(); ++l) {
        caches.push_back(
            msgcn::channel_forward(graphs[l], model.channels[l], false, 0.0, nullptr));
        outputs.push_back(caches.back().output);
    }
    const msgcn::Matrix fused = msgcn::fuse_outputs(outputs, fusions);
    const msgcn::Gradients grads =
        msgcn::backward(model, graphs, fusions, caches, fused, labels);

    double worst = 0.0;
    for (size_t l = 0; l < model.channels.size(); ++l)
        for (size_t k = 0; k < model.channels[l].size(); ++k)
            for (size_t i = 0; i < model.channels[l][k].d.size(); ++i) {
                const double fd = fd_gradient(model, graphs, fusions, labels, l, k, i);
                worst = std::max(worst, rel_error(grads.channels[l][k].d[i], fd));
            }
    return worst;
}

// Flood fill over a parcel's pixels; true when the set is 4-connected.
inline bool parcel_connected(const msgcn::SegmentationLevel& level, int32_t id) {
    std::vector<std::pair<int, int>> pixels;
    for (int r = 0; r < level.height; ++r)
        for (int c = 0; c < level.width; ++c)
            if (level.label_at(r, c) == id) pixels.push_back({r, c});
    if (pixels.empty()) return false;

    std::vector<char> seen(pixels.size(), 0);
    std::vector<size_t> stack = {0};
    seen[0] = 1;
    size_t visited = 1;
    auto index_of = [&](int r, int c) -> int {
        for (size_t i = 0; i < pixels.size(); ++i)
            if (pixels[i].first == r && pixels[i].second == c) return static_cast<int>(i);
        return -1;
    };
    while (!stack.empty()) {
        auto [r, c] = pixels[stack.back()];
        stack.pop_back();
        const int dr[] = {1, -1, 0, 0}, dc[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int idx = index_of(r + dr[d], c + dc[d]);
            if (idx >= 0 && !seen[idx]) {
                seen[idx] = 1;
                ++visited;
                stack.push_back(idx);
            }
        }
    }
    return visited == pixels.size();
}

// Random 32x32 mosaic with structure at three scales: small jittered blocks
// that coalesce first, quadrants that merge next, halves that merge last.
inline msgcn::RasterPair mosaic_scene(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.01);

    const int n = 32;
    const double dq = 0.32 + 0.08 * unif(rng);   // quadrant contrast
    const double dh = 0.55 + 0.10 * unif(rng);   // half-image contrast
    const double base[4] = {0.05, 0.05 + dq, 0.05 + dh, 0.05 + dh + dq};

    double block_jitter[4][4][4];  // [quadrant][block_r][block_c]
    for (auto& q : block_jitter)
        for (auto& row : q)
            for (double& v : row) v = jitter(rng);

    msgcn::Raster img;
    img.width = n;
    img.height = n;
    img.bands = 1;
    img.data.resize(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const int q = (r / 16) * 2 + (c / 16);
            const int br = (r % 16) / 4, bc = (c % 16) / 4;
            img.data[static_cast<size_t>(r) * n + c] =
                base[q] + block_jitter[q][br][bc] + noise(rng);
        }
    return msgcn::stack_pair(img, img);
}

}  // namespace testsupport
