#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace indexnet {

// A named view over one contiguous parameter buffer and its gradient buffer.
// The optimizer and the finite-difference checker both address the model
// through a flat list of these.
struct ParamBlock {
    std::string name;
    double* values = nullptr;
    double* grads = nullptr;
    std::size_t size = 0;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias correction. Keeps one (m, v) pair per registered
// block, keyed by position in the block list, so the same block layout must
// be passed to every step() call.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {});

    // step() increments the shared step counter, then for each block applies
    //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
    //   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
    // Gradients are read, never modified; the caller zeroes them between
    // steps. A non-finite gradient raises NumericError naming the block.
    void step(const std::vector<ParamBlock>& blocks);

    long step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

    // First/second moment buffers, exposed for checkpointing.
    std::vector<std::vector<double>>& moments_m() { return m_; }
    std::vector<std::vector<double>>& moments_v() { return v_; }
    void set_step_count(long t) { t_ = t; }

private:
    AdamConfig cfg_;
    long t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

// Central-difference gradient check. `loss` must be a pure function of the
// parameters reachable through `blocks`. For each sampled coordinate the
// analytic gradient already stored in the block's grad buffer is compared
// against (loss(p+h) - loss(p-h)) / (2h); the relative error uses
// max(|analytic|, |numeric|, 1e-8) as denominator. Returns the max relative
// error over all checked coordinates. `max_coords_per_block` == 0 checks
// every coordinate.
double grad_check(const std::function<double()>& loss,
                  const std::vector<ParamBlock>& blocks,
                  double h = 1e-5,
                  std::size_t max_coords_per_block = 0);

} // namespace indexnet
