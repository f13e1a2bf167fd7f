#pragma once

#include <cstddef>
#include <vector>

#include "indexnet/adam.hpp"
#include "indexnet/calendar.hpp"
#include "indexnet/embedding.hpp"
#include "indexnet/linalg.hpp"

namespace indexnet {

// Static shape of the forecaster. The backbone width D grows by t_dim when
// the timestamp embedding is enabled and by c_dim when the channel
// embedding is; disabling either genuinely narrows every residual block.
struct ModelDims {
    std::size_t lookback = 96;   // L
    std::size_t horizon = 96;    // T
    std::size_t d_model = 128;
    std::size_t d_ff = 128;
    std::size_t layers = 3;      // residual blocks, m
    std::size_t t_dim = 16;
    std::size_t c_dim = 16;
    bool te_enabled = true;
    bool ce_enabled = true;

    std::size_t backbone_width() const {
        return d_model + (te_enabled ? t_dim : 0) + (ce_enabled ? c_dim : 0);
    }
};

// One H <- H + contract(relu(expand(H))) layer.
struct ResidualBlock {
    AffineLayer expand;   // D -> d_ff
    AffineLayer contract; // d_ff -> D
};

struct ModelParams {
    ModelDims dims;
    AffineLayer input_proj; // L -> d_model
    std::vector<ResidualBlock> blocks;
    AffineLayer head;       // D -> horizon
};

// The whole trainable state: backbone plus both embedding tables.
struct Model {
    ModelParams params;
    TimestampTables tables;
    ChannelTable channels;
};

// Zero-filled parameters of the exact shapes (the honest build state:
// a fresh model predicts each window's mean). Weight randomization is a
// separate, seeded step.
ModelParams build_model(const ModelDims& dims);
void init_weights(ModelParams& params, Rng& rng);

// Per-window, per-channel Z-score with no learnable affine. sigma is the
// window's population std clamped to at least 1e-5 so constant windows
// normalize to zeros instead of dividing by zero.
struct InstanceNormState {
    double mu = 0.0;
    double sigma = 1.0;
};

InstanceNormState instance_normalize(const double* x, std::size_t len, Vec& x_hat);
void instance_denormalize(const Vec& y_norm, const InstanceNormState& state, Vec& y);

// Everything the backward pass needs to replay one forward pass: cached
// activations, ReLU masks, the retrieval sources, and the normalization
// state. Buffers are reused across calls to avoid reallocation.
struct ForwardTrace {
    InstanceNormState norm;
    Vec x_hat;                    // L
    Vec z;                        // d_model
    Vec z_t;                      // d_model + t_dim (empty when TE off)
    Vec z_tc;                     // D, the backbone input
    std::vector<Vec> h;           // layers+1 entries of width D; h[0] = z_tc
    std::vector<Vec> pre_act;     // per block, width d_ff (before ReLU)
    std::vector<ReluMask> masks;  // per block
    std::vector<Vec> relu_out;    // per block, width d_ff
    Vec y_norm;                   // horizon
    SourceIndices sources;
    // scratch for backward
    Vec grad_h, grad_branch, grad_relu, grad_pre, grad_x;
};

// Normalize -> project -> concat embeddings -> residual blocks -> head ->
// de-normalize, for one channel's window. `input` is that channel's L
// consecutive values (in whatever space the caller standardized them to;
// the output lands in the same space). `channel` is 1-based.
Vec forward(const ModelParams& params, const TimestampTables& tables,
            const ChannelTable& channels, const double* input, std::size_t len,
            const CalendarFields& cal, std::size_t channel, ForwardTrace& trace);

// Accumulates gradients for all parameters (backbone and embedding rows)
// given the loss gradient w.r.t. the *normalized* prediction y_norm. The
// trace must come from a matching forward call; only its scratch buffers
// are mutated.
void backward(ModelParams& params, TimestampTables& tables, ChannelTable& channels,
              ForwardTrace& trace, const Vec& grad_y_norm);

// Flat, ordered, named views over every trainable buffer that is active
// under the dims/groups flags. This order is the checkpoint layout.
std::vector<ParamBlock> param_blocks(Model& model);

void zero_grads(Model& model);

// Exact count of trainable scalars under the active flags.
std::size_t param_count(const Model& model);

} // namespace indexnet
