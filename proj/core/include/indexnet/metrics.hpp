#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace indexnet {

// Flat error averages over aligned prediction/truth points. `space` tags
// which value space the points were in ("standardized" for the benchmark
// convention, "raw" otherwise). MAPE divides by truth, so entries with
// |truth| < 1e-8 are skipped and counted instead of exploding.
struct MetricsReport {
    double mse = 0.0;
    double mae = 0.0;
    double mape = 0.0; // percent
    double rmse = 0.0;
    std::size_t n_points = 0;
    std::size_t mape_skipped = 0;
    std::string space = "standardized";
};

MetricsReport compute_metrics(const std::vector<double>& pred,
                              const std::vector<double>& truth,
                              const std::string& space = "standardized");

} // namespace indexnet
