#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "indexnet/dataset.hpp"
#include "indexnet/embedding.hpp"
#include "indexnet/forecaster.hpp"
#include "indexnet/metrics.hpp"

namespace indexnet {

enum class InitMode { zeros, random_init };

// Everything one training run depends on. The seed fully determines weight
// init and batch order; presets fill in the per-dataset defaults.
struct TrainConfig {
    ModelDims dims;
    ActiveGroups groups;
    InitMode init_mode = InitMode::zeros;
    double lr = 1e-3;
    std::size_t batch_size = 256;
    std::size_t max_epochs = 30;
    std::size_t patience = 3;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    int freq_minutes = 60; // used when the CSV has no date column
};

// Per-dataset defaults. Known names: etth1, etth2, ettm1, ettm2, weather,
// solar, electricity, traffic. Unknown names raise ConfigError listing the
// choices.
TrainConfig preset_config(const std::string& name);
const std::vector<std::string>& preset_names();

struct EpochRecord {
    std::size_t epoch = 0;
    double train_mse = 0.0; // normalized-space, averaged over the epoch's batches
    double val_mse = 0.0;   // normalized-space, full validation pass
    double elapsed_s = 0.0;
};

struct TrainResult {
    Model model; // parameters of the best validation epoch, not the last one
    StandardizerStats stats;
    std::vector<EpochRecord> history;
    double best_val_mse = 0.0;
    std::size_t best_epoch = 0;
};

// Mini-batch MSE training in instance-normalized space over (window,
// channel) samples, Adam updates, per-epoch seeded shuffling, early
// stopping once validation MSE fails to improve for `patience` epochs.
// `on_epoch`, when set, observes each record as it is produced (the CLI
// streams history lines through it). Non-finite losses abort with a
// NumericError naming epoch and batch.
TrainResult train(const TimeSeriesDataset& ds, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = nullptr);

// Stride-1 evaluation over one split: predictions are de-instance-
// normalized by the model, and metrics are computed in the globally
// standardized space defined by the train-split statistics. `horizon`
// must match the model (ConfigError naming both otherwise); an empty
// split is a DataError.
MetricsReport evaluate(Model& model, const StandardizerStats& stats,
                       const TimeSeriesDataset& ds, Split split, std::size_t horizon,
                       std::size_t workers = 1);

// One row of the four-case embedding ablation.
struct AblationCase {
    int case_id = 0; // 1..4
    bool te = false;
    bool ce = false;
    MetricsReport test_metrics;
};

// Trains the four {TE, CE} x {off, on} variants with the identical seed and
// reports test metrics for each: case 1 = (off, off), 2 = (off, on),
// 3 = (on, off), 4 = (on, on). `on_case`, when set, observes each finished
// case so partial results can be persisted incrementally.
std::array<AblationCase, 4> ablation_run(
    const TimeSeriesDataset& ds, const TrainConfig& cfg,
    const std::function<void(const AblationCase&)>& on_case = nullptr);

} // namespace indexnet
