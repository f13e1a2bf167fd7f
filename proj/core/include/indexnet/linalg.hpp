#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "indexnet/rng.hpp"

namespace indexnet {

using Vec = std::vector<double>;
using ReluMask = std::vector<std::uint8_t>;

// Row-major dense matrix of f64. All model weights and embedding tables
// live in this type.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row_ptr(std::size_t r) { return data.data() + r * cols; }
    const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

    void fill(double value) { data.assign(data.size(), value); }
    std::size_t size() const { return data.size(); }
};

// One Linear(.) with paired gradient buffers. weight is (out x in).
struct AffineLayer {
    DenseMatrix weight;
    Vec bias;
    DenseMatrix grad_weight;
    Vec grad_bias;

    AffineLayer() = default;
    AffineLayer(std::size_t out_dim, std::size_t in_dim)
        : weight(out_dim, in_dim),
          bias(out_dim, 0.0),
          grad_weight(out_dim, in_dim),
          grad_bias(out_dim, 0.0) {}

    std::size_t in_dim() const { return weight.cols; }
    std::size_t out_dim() const { return weight.rows; }

    // Uniform in [-1/sqrt(in), 1/sqrt(in)], drawn from rng in row-major order.
    void init_uniform(Rng& rng);
    void zero_grads();
};

// y = W x + b. Throws ShapeError naming both dims on mismatch.
Vec affine_forward(const AffineLayer& layer, const Vec& x);
void affine_forward(const AffineLayer& layer, const double* x, std::size_t n, Vec& y);

// Accumulates dL/dW += grad_out (x) x and dL/db += grad_out into the layer's
// grad buffers; returns W^T grad_out. Accumulation (not overwrite) is what
// lets shared tables collect gradients across samples in a batch.
Vec affine_backward(AffineLayer& layer, const Vec& x, const Vec& grad_out);
void affine_backward(AffineLayer& layer, const double* x, std::size_t n,
                     const Vec& grad_out, Vec& grad_in);

// y_i = max(x_i, 0); mask_i = (x_i > 0). The subgradient at 0 is 0.
void relu_forward(const Vec& x, Vec& y, ReluMask& mask);

// grad passes where mask is set, zero elsewhere.
void relu_backward(const ReluMask& mask, const Vec& grad_out, Vec& grad_in);

} // namespace indexnet
