#include "indexnet/adam.hpp"

#include <algorithm>
#include <cmath>

#include "indexnet/errors.hpp"

namespace indexnet {

Adam::Adam(AdamConfig cfg) : cfg_(cfg) {}

void Adam::step(const std::vector<ParamBlock>& blocks) {
    if (m_.size() != blocks.size()) {
        m_.resize(blocks.size());
        v_.resize(blocks.size());
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            m_[b].assign(blocks[b].size, 0.0);
            v_[b].assign(blocks[b].size, 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const ParamBlock& blk = blocks[b];
        double* m = m_[b].data();
        double* v = v_[b].data();
        for (std::size_t i = 0; i < blk.size; ++i) {
            const double g = blk.grads[i];
            if (!std::isfinite(g)) {
                throw NumericError("non-finite gradient in parameter block '" +
                                   blk.name + "' at index " + std::to_string(i));
            }
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            blk.values[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
        }
    }
}

double grad_check(const std::function<double()>& loss,
                  const std::vector<ParamBlock>& blocks,
                  double h,
                  std::size_t max_coords_per_block) {
    double worst = 0.0;
    for (const ParamBlock& blk : blocks) {
        std::size_t count = blk.size;
        if (max_coords_per_block > 0) count = std::min(count, max_coords_per_block);
        // Sample coordinates evenly across the block so large tables are
        // still probed at both ends.
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t i = (count == blk.size)
                                      ? k
                                      : (k * blk.size) / count;
            const double saved = blk.values[i];
            blk.values[i] = saved + h;
            const double up = loss();
            blk.values[i] = saved - h;
            const double down = loss();
            blk.values[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double analytic = blk.grads[i];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            const double rel = std::abs(analytic - numeric) / denom;
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

} // namespace indexnet
