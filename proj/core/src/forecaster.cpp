#include "indexnet/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "indexnet/errors.hpp"

namespace indexnet {

ModelParams build_model(const ModelDims& dims) {
    if (dims.lookback < 2 || dims.horizon < 1) {
        throw ConfigError("lookback must be at least 2 and horizon at least 1");
    }
    if (dims.d_model < 1 || dims.d_ff < 1) {
        throw ConfigError("d_model and d_ff must be at least 1");
    }
    if (dims.te_enabled && dims.t_dim < 1) {
        throw ConfigError("t_dim must be at least 1 when the timestamp embedding is on");
    }
    if (dims.ce_enabled && dims.c_dim < 1) {
        throw ConfigError("c_dim must be at least 1 when the channel embedding is on");
    }
    ModelParams p;
    p.dims = dims;
    p.input_proj = AffineLayer(dims.d_model, dims.lookback);
    const std::size_t width = dims.backbone_width();
    p.blocks.resize(dims.layers);
    for (ResidualBlock& b : p.blocks) {
        b.expand = AffineLayer(dims.d_ff, width);
        b.contract = AffineLayer(width, dims.d_ff);
    }
    p.head = AffineLayer(dims.horizon, width);
    return p;
}

void init_weights(ModelParams& params, Rng& rng) {
    params.input_proj.init_uniform(rng);
    for (ResidualBlock& b : params.blocks) {
        b.expand.init_uniform(rng);
        b.contract.init_uniform(rng);
    }
    params.head.init_uniform(rng);
}

InstanceNormState instance_normalize(const double* x, std::size_t len, Vec& x_hat) {
    if (len < 2) throw ShapeError("instance_normalize needs a window of at least 2 steps");
    InstanceNormState s;
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) sum += x[i];
    s.mu = sum / static_cast<double>(len);
    double ss = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double d = x[i] - s.mu;
        ss += d * d;
    }
    s.sigma = std::max(std::sqrt(ss / static_cast<double>(len)), 1e-5);
    x_hat.resize(len);
    const double inv = 1.0 / s.sigma;
    for (std::size_t i = 0; i < len; ++i) x_hat[i] = (x[i] - s.mu) * inv;
    return s;
}

void instance_denormalize(const Vec& y_norm, const InstanceNormState& state, Vec& y) {
    y.resize(y_norm.size());
    for (std::size_t i = 0; i < y_norm.size(); ++i) y[i] = y_norm[i] * state.sigma + state.mu;
}

Vec forward(const ModelParams& params, const TimestampTables& tables,
            const ChannelTable& channels, const double* input, std::size_t len,
            const CalendarFields& cal, std::size_t channel, ForwardTrace& trace) {
    const ModelDims& d = params.dims;
    if (len != d.lookback) {
        throw ShapeError("forward: window length " + std::to_string(len) +
                         " does not match lookback " + std::to_string(d.lookback));
    }
    trace.norm = instance_normalize(input, len, trace.x_hat);
    affine_forward(params.input_proj, trace.x_hat.data(), len, trace.z);

    // Assemble the backbone input: z, then e_w + e_m, then e_identity.
    const std::size_t width = d.backbone_width();
    trace.z_tc.resize(width);
    std::memcpy(trace.z_tc.data(), trace.z.data(), d.d_model * sizeof(double));
    std::size_t offset = d.d_model;
    if (d.te_enabled) {
        Vec e_w, e_m;
        retrieve_timestamp(tables, cal, e_w, e_m, trace.sources);
        for (std::size_t i = 0; i < d.t_dim; ++i) trace.z_tc[offset + i] = e_w[i] + e_m[i];
        trace.z_t.assign(trace.z_tc.begin(),
                         trace.z_tc.begin() + static_cast<std::ptrdiff_t>(offset + d.t_dim));
        offset += d.t_dim;
    } else {
        trace.z_t.clear();
        trace.sources = SourceIndices{};
    }
    if (d.ce_enabled) {
        const Vec e_id = retrieve_channel(channels, channel);
        std::memcpy(trace.z_tc.data() + offset, e_id.data(), d.c_dim * sizeof(double));
        trace.sources.channel_row = static_cast<int>(channel - 1);
    } else {
        trace.sources.channel_row = -1;
        if (channel < 1 || channel > channels.identity.rows()) {
            throw ShapeError("channel index " + std::to_string(channel) + " outside 1.." +
                             std::to_string(channels.identity.rows()));
        }
    }

    trace.h.resize(d.layers + 1);
    trace.pre_act.resize(d.layers);
    trace.masks.resize(d.layers);
    trace.relu_out.resize(d.layers);
    trace.h[0] = trace.z_tc;
    for (std::size_t l = 0; l < d.layers; ++l) {
        const ResidualBlock& b = params.blocks[l];
        affine_forward(b.expand, trace.h[l].data(), width, trace.pre_act[l]);
        relu_forward(trace.pre_act[l], trace.relu_out[l], trace.masks[l]);
        affine_forward(b.contract, trace.relu_out[l].data(), d.d_ff, trace.h[l + 1]);
        for (std::size_t i = 0; i < width; ++i) trace.h[l + 1][i] += trace.h[l][i];
    }

    affine_forward(params.head, trace.h[d.layers].data(), width, trace.y_norm);
    Vec y;
    instance_denormalize(trace.y_norm, trace.norm, y);
    return y;
}

void backward(ModelParams& params, TimestampTables& tables, ChannelTable& channels,
              ForwardTrace& trace, const Vec& grad_y_norm) {
    const ModelDims& d = params.dims;
    const std::size_t width = d.backbone_width();
    ForwardTrace& t = trace;

    affine_backward(params.head, trace.h[d.layers].data(), width, grad_y_norm, t.grad_h);

    for (std::size_t l = d.layers; l-- > 0;) {
        ResidualBlock& b = params.blocks[l];
        affine_backward(b.contract, trace.relu_out[l].data(), d.d_ff, t.grad_h, t.grad_relu);
        relu_backward(trace.masks[l], t.grad_relu, t.grad_pre);
        affine_backward(b.expand, trace.h[l].data(), width, t.grad_pre, t.grad_branch);
        // Residual skip: grad into h[l] is the branch gradient plus the
        // gradient that flowed straight through the addition.
        for (std::size_t i = 0; i < width; ++i) t.grad_h[i] += t.grad_branch[i];
    }

    // Split the backbone-input gradient back into its concat slices.
    const Vec grad_z(t.grad_h.begin(), t.grad_h.begin() + static_cast<std::ptrdiff_t>(d.d_model));
    affine_backward(params.input_proj, trace.x_hat.data(), d.lookback, grad_z, t.grad_x);
    std::size_t offset = d.d_model;
    if (d.te_enabled) {
        // z_tc holds e_w + e_m in this slice, so the same gradient vector
        // flows to both aggregates (and on to each contributing row).
        const Vec grad_e(t.grad_h.begin() + static_cast<std::ptrdiff_t>(offset),
                         t.grad_h.begin() + static_cast<std::ptrdiff_t>(offset + d.t_dim));
        const Vec grad_m = tables.groups.month_level ? grad_e : Vec{};
        embedding_backward(tables, channels, trace.sources, grad_e, grad_m, Vec{});
        offset += d.t_dim;
    }
    if (d.ce_enabled) {
        const Vec grad_id(t.grad_h.begin() + static_cast<std::ptrdiff_t>(offset),
                          t.grad_h.begin() + static_cast<std::ptrdiff_t>(offset + d.c_dim));
        embedding_backward(tables, channels, trace.sources, Vec{}, Vec{}, grad_id);
    }
}

std::vector<ParamBlock> param_blocks(Model& model) {
    std::vector<ParamBlock> blocks;
    auto add = [&blocks](const std::string& name, DenseMatrix& w, DenseMatrix& g) {
        blocks.push_back({name, w.data.data(), g.data.data(), w.size()});
    };
    auto add_vec = [&blocks](const std::string& name, Vec& v, Vec& g) {
        blocks.push_back({name, v.data(), g.data(), v.size()});
    };
    auto add_layer = [&](const std::string& name, AffineLayer& l) {
        add(name + ".weight", l.weight, l.grad_weight);
        add_vec(name + ".bias", l.bias, l.grad_bias);
    };
    ModelParams& p = model.params;
    add_layer("input_proj", p.input_proj);
    for (std::size_t l = 0; l < p.blocks.size(); ++l) {
        add_layer("block" + std::to_string(l) + ".expand", p.blocks[l].expand);
        add_layer("block" + std::to_string(l) + ".contract", p.blocks[l].contract);
    }
    add_layer("head", p.head);
    if (p.dims.te_enabled) {
        TimestampTables& t = model.tables;
        if (t.groups.week_level) {
            if (!t.minute.empty()) add("te.minute", t.minute.values, t.minute.grads);
            add("te.hour", t.hour.values, t.hour.grads);
            add("te.dow", t.dow.values, t.dow.grads);
        }
        if (t.groups.month_level) {
            add("te.dom", t.dom.values, t.dom.grads);
            add("te.month", t.month.values, t.month.grads);
        }
    }
    if (p.dims.ce_enabled) {
        add("ce.identity", model.channels.identity.values, model.channels.identity.grads);
    }
    return blocks;
}

void zero_grads(Model& model) {
    model.params.input_proj.zero_grads();
    for (ResidualBlock& b : model.params.blocks) {
        b.expand.zero_grads();
        b.contract.zero_grads();
    }
    model.params.head.zero_grads();
    model.tables.minute.zero_grads();
    model.tables.hour.zero_grads();
    model.tables.dow.zero_grads();
    model.tables.dom.zero_grads();
    model.tables.month.zero_grads();
    model.channels.identity.zero_grads();
}

std::size_t param_count(const Model& model) {
    std::size_t n = 0;
    auto layer = [&n](const AffineLayer& l) { n += l.weight.size() + l.bias.size(); };
    layer(model.params.input_proj);
    for (const ResidualBlock& b : model.params.blocks) {
        layer(b.expand);
        layer(b.contract);
    }
    layer(model.params.head);
    if (model.params.dims.te_enabled) {
        const TimestampTables& t = model.tables;
        if (t.groups.week_level) {
            n += t.minute.values.size() + t.hour.values.size() + t.dow.values.size();
        }
        if (t.groups.month_level) n += t.dom.values.size() + t.month.values.size();
    }
    if (model.params.dims.ce_enabled) n += model.channels.identity.values.size();
    return n;
}

} // namespace indexnet
