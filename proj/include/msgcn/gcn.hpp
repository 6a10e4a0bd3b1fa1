#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "msgcn/dense.hpp"
#include "msgcn/fusion.hpp"
#include "msgcn/graph.hpp"

namespace msgcn {

struct LabelSet {
    std::vector<int32_t> indices;  // finest-scale node ids, unique
    std::vector<uint8_t> labels;   // 0 unchanged, 1 changed
};

struct GcnHyperparams {
    double dropout_rate = 0.5;
    double weight_decay = 0.0005;
    double learning_rate = 0.01;
};

// L channels of stacked graph convolutions sharing layer dimensions but not
// weights, trained jointly against the fused cross-entropy loss.
struct GcnModel {
    std::vector<std::vector<Matrix>> channels;  // [channel][layer] weights
    std::vector<int> layer_dims;                // C, ..., 2
    GcnHyperparams hp;
    std::mt19937_64 rng;

    int depth() const { return static_cast<int>(layer_dims.size()) - 1; }
};

GcnModel init_model(int num_channels, const std::vector<int>& layer_dims,
                    const GcnHyperparams& hp, uint64_t seed);

enum class Activation { Relu, None };

// sigma(P * X * W)
Matrix layer_forward(const SparseSym& P, const Matrix& X, const Matrix& W,
                     Activation activation);

// Intermediates of one channel forward pass, consumed by the backward pass.
struct ChannelCache {
    std::vector<Matrix> inputs;    // H_0..H_{N-1}, post-dropout layer inputs
    std::vector<Matrix> preact;    // P*H_k*W_k per layer
    std::vector<Matrix> masks;     // dropout scale factors on hidden outputs
    Matrix output;                 // softmax rows
};

// Graph-convolution stack: hidden layers ReLU (with inverted dropout in train
// mode), final layer softmax per row.
ChannelCache channel_forward(const ParcelGraph& graph,
                             const std::vector<Matrix>& weights, bool train,
                             double dropout_rate, std::mt19937_64* rng);

// Cross-entropy over labeled fused rows; entries clamped at 1e-12 before ln.
// Weight decay is part of the training objective, not of this value.
double fused_loss(const Matrix& fused, const LabelSet& labels);

struct Gradients {
    std::vector<std::vector<Matrix>> channels;  // same shape as model weights
};

// Exact reverse-mode gradient of (fused cross-entropy + 0.5*lambda*sum||W||^2)
// with respect to every weight matrix, reusing the forward caches' dropout
// masks. fusions[k] pairs with channel k+1.
Gradients backward(const GcnModel& model, const std::vector<ParcelGraph>& graphs,
                   const std::vector<FusionMatrix>& fusions,
                   const std::vector<ChannelCache>& caches, const Matrix& fused,
                   const LabelSet& labels);

struct TrainResult {
    std::vector<double> loss_history;  // eval-mode loss per epoch
    Matrix fused;                      // final eval-mode fused output
};

// Full-batch gradient descent, W <- W - lr * grad (the gradient already
// carries the lambda*W decay term), `epochs` steps. Records the eval-mode
// loss before training and after every epoch. Throws on non-finite loss.
TrainResult train(GcnModel& model, const std::vector<ParcelGraph>& graphs,
                  const std::vector<FusionMatrix>& fusions, const LabelSet& labels,
                  int epochs);

// Eval-mode (no dropout) forward + fusion with the current weights.
Matrix evaluate(const GcnModel& model, const std::vector<ParcelGraph>& graphs,
                const std::vector<FusionMatrix>& fusions);

// ceil(ratio * N_1) unique nodes chosen uniformly; each labeled by majority
// vote of reference pixels inside the parcel, ties -> changed.
LabelSet sample_labels(const SegmentationLevel& finest, const ChangeMap& reference,
                       double ratio, uint64_t seed);

}  // namespace msgcn
