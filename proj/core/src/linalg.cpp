#include "indexnet/linalg.hpp"

#include <cmath>
#include <string>

#include "indexnet/errors.hpp"

namespace indexnet {

void AffineLayer::init_uniform(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(weight.cols));
    for (double& w : weight.data) w = rng.uniform(-bound, bound);
    for (double& b : bias) b = rng.uniform(-bound, bound);
}

void AffineLayer::zero_grads() {
    grad_weight.fill(0.0);
    grad_bias.assign(grad_bias.size(), 0.0);
}

static void check_in_dim(const AffineLayer& layer, std::size_t got, const char* what) {
    if (got != layer.in_dim()) {
        throw ShapeError(std::string(what) + ": input has dim " + std::to_string(got) +
                         " but layer expects " + std::to_string(layer.in_dim()));
    }
}

void affine_forward(const AffineLayer& layer, const double* x, std::size_t n, Vec& y) {
    check_in_dim(layer, n, "affine_forward");
    const std::size_t out = layer.out_dim();
    y.resize(out);
    for (std::size_t r = 0; r < out; ++r) {
        const double* w = layer.weight.row_ptr(r);
        double acc = layer.bias[r];
        for (std::size_t c = 0; c < n; ++c) acc += w[c] * x[c];
        y[r] = acc;
    }
}

Vec affine_forward(const AffineLayer& layer, const Vec& x) {
    Vec y;
    affine_forward(layer, x.data(), x.size(), y);
    return y;
}

void affine_backward(AffineLayer& layer, const double* x, std::size_t n,
                     const Vec& grad_out, Vec& grad_in) {
    check_in_dim(layer, n, "affine_backward");
    const std::size_t out = layer.out_dim();
    if (grad_out.size() != out) {
        throw ShapeError("affine_backward: grad_out has dim " +
                         std::to_string(grad_out.size()) + " but layer expects " +
                         std::to_string(out));
    }
    grad_in.assign(n, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
        const double g = grad_out[r];
        layer.grad_bias[r] += g;
        double* gw = layer.grad_weight.row_ptr(r);
        const double* w = layer.weight.row_ptr(r);
        for (std::size_t c = 0; c < n; ++c) {
            gw[c] += g * x[c];
            grad_in[c] += w[c] * g;
        }
    }
}

Vec affine_backward(AffineLayer& layer, const Vec& x, const Vec& grad_out) {
    Vec grad_in;
    affine_backward(layer, x.data(), x.size(), grad_out, grad_in);
    return grad_in;
}

void relu_forward(const Vec& x, Vec& y, ReluMask& mask) {
    const std::size_t n = x.size();
    y.resize(n);
    mask.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool on = x[i] > 0.0;
        mask[i] = on ? 1 : 0;
        y[i] = on ? x[i] : 0.0;
    }
}

void relu_backward(const ReluMask& mask, const Vec& grad_out, Vec& grad_in) {
    if (grad_out.size() != mask.size()) {
        throw ShapeError("relu_backward: grad_out has dim " +
                         std::to_string(grad_out.size()) + " but mask has dim " +
                         std::to_string(mask.size()));
    }
    const std::size_t n = mask.size();
    grad_in.resize(n);
    for (std::size_t i = 0; i < n; ++i) grad_in[i] = mask[i] ? grad_out[i] : 0.0;
}

} // namespace indexnet
