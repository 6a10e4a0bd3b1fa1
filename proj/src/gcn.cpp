#include "msgcn/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msgcn {

namespace {

constexpr double kLossClamp = 1e-12;

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows, logits.cols);
    for (int i = 0; i < logits.rows; ++i) {
        double mx = logits(i, 0);
        for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, logits(i, j));
        double z = 0.0;
        for (int j = 0; j < logits.cols; ++j) {
            out(i, j) = std::exp(logits(i, j) - mx);
            z += out(i, j);
        }
        for (int j = 0; j < logits.cols; ++j) out(i, j) /= z;
    }
    return out;
}

// dL/dZ for O = softmax_rows(Z) given dL/dO.
Matrix softmax_backward(const Matrix& output, const Matrix& grad_out) {
    Matrix grad(output.rows, output.cols);
    for (int i = 0; i < output.rows; ++i) {
        double dot = 0.0;
        for (int j = 0; j < output.cols; ++j) dot += grad_out(i, j) * output(i, j);
        for (int j = 0; j < output.cols; ++j)
            grad(i, j) = output(i, j) * (grad_out(i, j) - dot);
    }
    return grad;
}

}  // namespace

GcnModel init_model(int num_channels, const std::vector<int>& layer_dims,
                    const GcnHyperparams& hp, uint64_t seed) {
    if (layer_dims.size() < 3)
        throw std::runtime_error("init_model: need at least two layers");
    if (layer_dims.back() != 2)
        throw std::runtime_error("init_model: output dimension must be 2");

    GcnModel model;
    model.layer_dims = layer_dims;
    model.hp = hp;
    model.rng.seed(seed);
    model.channels.resize(num_channels);
    for (auto& channel : model.channels) {
        for (size_t k = 0; k + 1 < layer_dims.size(); ++k) {
            const int in = layer_dims[k], out = layer_dims[k + 1];
            Matrix w(in, out);
            const double limit = std::sqrt(6.0 / (in + out));  // Glorot uniform
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (double& v : w.d) v = dist(model.rng);
            channel.push_back(std::move(w));
        }
    }
    return model;
}

Matrix layer_forward(const SparseSym& P, const Matrix& X, const Matrix& W,
                     Activation activation) {
    if (P.n != X.rows || X.cols != W.rows)
        throw std::runtime_error("layer_forward: dimension mismatch");
    Matrix out = matmul(P.apply(X), W);
    if (activation == Activation::Relu)
        for (double& v : out.d) v = v > 0.0 ? v : 0.0;
    return out;
}

ChannelCache channel_forward(const ParcelGraph& graph,
                             const std::vector<Matrix>& weights, bool train,
                             double dropout_rate, std::mt19937_64* rng) {
    const int depth = static_cast<int>(weights.size());
    if (depth < 2) throw std::runtime_error("channel_forward: depth must be >= 2");

    ChannelCache cache;
    Matrix h = graph.features;
    for (int k = 0; k < depth; ++k) {
        cache.inputs.push_back(h);
        Matrix a = matmul(graph.propagation.apply(h), weights[k]);
        cache.preact.push_back(a);
        if (k == depth - 1) {
            cache.output = softmax_rows(a);
            break;
        }
        for (double& v : a.d) v = v > 0.0 ? v : 0.0;
        Matrix mask(a.rows, a.cols);
        if (train && dropout_rate > 0.0) {
            const double keep = 1.0 - dropout_rate;
            std::bernoulli_distribution coin(keep);
            for (double& m : mask.d) m = coin(*rng) ? 1.0 / keep : 0.0;
            for (size_t i = 0; i < a.d.size(); ++i) a.d[i] *= mask.d[i];
        } else {
            std::fill(mask.d.begin(), mask.d.end(), 1.0);
        }
        cache.masks.push_back(std::move(mask));
        h = std::move(a);
    }
    return cache;
}

double fused_loss(const Matrix& fused, const LabelSet& labels) {
    double loss = 0.0;
    for (size_t t = 0; t < labels.indices.size(); ++t) {
        const int32_t i = labels.indices[t];
        if (i < 0 || i >= fused.rows) throw std::runtime_error("fused_loss: bad index");
        const double e = fused(i, labels.labels[t]);
        if (e <= 0.0)
            throw std::runtime_error("fused_loss: nonpositive fused entry at a labeled node");
        loss -= std::log(std::max(e, kLossClamp));
    }
    return loss;
}

Gradients backward(const GcnModel& model, const std::vector<ParcelGraph>& graphs,
                   const std::vector<FusionMatrix>& fusions,
                   const std::vector<ChannelCache>& caches, const Matrix& fused,
                   const LabelSet& labels) {
    const size_t num_channels = model.channels.size();
    if (graphs.size() != num_channels || caches.size() != num_channels ||
        fusions.size() + 1 != num_channels)
        throw std::runtime_error("backward: shape mismatch");

    // dL/dE: only labeled rows contribute; clamped entries are constants.
    Matrix grad_fused(fused.rows, fused.cols);
    for (size_t t = 0; t < labels.indices.size(); ++t) {
        const int32_t i = labels.indices[t];
        const int f = labels.labels[t];
        const double e = fused(i, f);
        if (e > kLossClamp) grad_fused(i, f) += -1.0 / e;
    }

    Gradients grads;
    grads.channels.resize(num_channels);
    for (size_t l = 0; l < num_channels; ++l) {
        const auto& weights = model.channels[l];
        const auto& cache = caches[l];
        const SparseSym& prop = graphs[l].propagation;
        const int depth = static_cast<int>(weights.size());

        Matrix grad_out =
            l == 0 ? grad_fused : fusions[l - 1].apply_transposed(grad_fused);
        Matrix grad_a = softmax_backward(cache.output, grad_out);

        grads.channels[l].resize(depth);
        for (int k = depth - 1; k >= 0; --k) {
            const Matrix u = prop.apply(cache.inputs[k]);
            Matrix gw = matmul_tn(u, grad_a);
            for (size_t i = 0; i < gw.d.size(); ++i)
                gw.d[i] += model.hp.weight_decay * weights[k].d[i];
            grads.channels[l][k] = std::move(gw);
            if (k == 0) break;
            Matrix grad_h = prop.apply(matmul_nt(grad_a, weights[k]));
            // back through dropout mask and ReLU of layer k-1
            const Matrix& mask = cache.masks[k - 1];
            const Matrix& pre = cache.preact[k - 1];
            grad_a = Matrix(grad_h.rows, grad_h.cols);
            for (size_t i = 0; i < grad_a.d.size(); ++i)
                grad_a.d[i] = pre.d[i] > 0.0 ? grad_h.d[i] * mask.d[i] : 0.0;
        }
    }
    return grads;
}

Matrix evaluate(const GcnModel& model, const std::vector<ParcelGraph>& graphs,
                const std::vector<FusionMatrix>& fusions) {
    std::vector<Matrix> outputs;
    for (size_t l = 0; l < model.channels.size(); ++l)
        outputs.push_back(
            channel_forward(graphs[l], model.channels[l], false, 0.0, nullptr).output);
    return fuse_outputs(outputs, fusions);
}

TrainResult train(GcnModel& model, const std::vector<ParcelGraph>& graphs,
                  const std::vector<FusionMatrix>& fusions, const LabelSet& labels,
                  int epochs) {
    if (epochs < 0) throw std::runtime_error("train: epochs must be >= 0");

    TrainResult result;
    result.fused = evaluate(model, graphs, fusions);
    result.loss_history.push_back(fused_loss(result.fused, labels));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::vector<ChannelCache> caches;
        std::vector<Matrix> outputs;
        for (size_t l = 0; l < model.channels.size(); ++l) {
            caches.push_back(channel_forward(graphs[l], model.channels[l], true,
                                             model.hp.dropout_rate, &model.rng));
            outputs.push_back(caches.back().output);
        }
        const Matrix fused = fuse_outputs(outputs, fusions);
        const Gradients grads = backward(model, graphs, fusions, caches, fused, labels);

        for (size_t l = 0; l < model.channels.size(); ++l)
            for (size_t k = 0; k < model.channels[l].size(); ++k)
                for (size_t i = 0; i < model.channels[l][k].d.size(); ++i)
                    model.channels[l][k].d[i] -=
                        model.hp.learning_rate * grads.channels[l][k].d[i];

        result.fused = evaluate(model, graphs, fusions);
        const double loss = fused_loss(result.fused, labels);
        if (!std::isfinite(loss))
            throw std::runtime_error("train: loss diverged to non-finite value");
        result.loss_history.push_back(loss);
    }
    return result;
}

LabelSet sample_labels(const SegmentationLevel& finest, const ChangeMap& reference,
                       double ratio, uint64_t seed) {
    if (ratio <= 0.0 || ratio > 1.0)
        throw std::runtime_error("sample_labels: ratio must be in (0,1]");
    if (reference.width != finest.width || reference.height != finest.height)
        throw std::runtime_error("sample_labels: reference size mismatch");

    const int n = static_cast<int>(finest.parcels.size());
    const int k = static_cast<int>(std::ceil(ratio * n));

    std::vector<int32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < k; ++i) {  // partial Fisher-Yates
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(ids[i], ids[pick(rng)]);
    }
    ids.resize(k);
    std::sort(ids.begin(), ids.end());

    std::vector<int> changed(n, 0);
    for (int r = 0; r < finest.height; ++r)
        for (int c = 0; c < finest.width; ++c)
            if (reference.at(r, c)) ++changed[finest.label_at(r, c)];

    LabelSet labels;
    labels.indices = ids;
    for (int32_t id : ids) {
        const int area = finest.parcels[id].area;
        labels.labels.push_back(2 * changed[id] >= area ? 1 : 0);  // tie -> changed
    }
    return labels;
}

}  // namespace msgcn
