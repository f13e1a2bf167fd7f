#include "indexnet/metrics.hpp"

#include <cmath>

#include "indexnet/errors.hpp"

namespace indexnet {

MetricsReport compute_metrics(const std::vector<double>& pred,
                              const std::vector<double>& truth,
                              const std::string& space) {
    if (pred.size() != truth.size()) {
        throw ShapeError("compute_metrics: " + std::to_string(pred.size()) +
                         " predictions vs " + std::to_string(truth.size()) +
                         " truth values");
    }
    if (pred.empty()) throw ShapeError("compute_metrics: empty input");

    MetricsReport r;
    r.space = space;
    r.n_points = pred.size();
    double se = 0.0, ae = 0.0, ape = 0.0;
    std::size_t ape_n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = truth[i] - pred[i];
        se += d * d;
        ae += std::abs(d);
        if (std::abs(truth[i]) >= 1e-8) {
            ape += std::abs(d / truth[i]);
            ++ape_n;
        }
    }
    const double n = static_cast<double>(pred.size());
    r.mse = se / n;
    r.mae = ae / n;
    r.rmse = std::sqrt(r.mse);
    r.mape_skipped = pred.size() - ape_n;
    r.mape = ape_n > 0 ? (ape / static_cast<double>(ape_n)) * 100.0 : 0.0;
    return r;
}

} // namespace indexnet
