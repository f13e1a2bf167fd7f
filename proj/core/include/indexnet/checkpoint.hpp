#pragma once

#include <string>
#include <vector>

#include "indexnet/dataset.hpp"
#include "indexnet/forecaster.hpp"

namespace indexnet {

inline constexpr const char* kCheckpointFormat = "indexnet-checkpoint-v1";

// A trained model plus everything needed to evaluate it on fresh data:
// the train-split standardizer, the sampling stride the tables were built
// for, and the channel names (for labeling exports).
struct Checkpoint {
    Model model;
    StandardizerStats stats;
    int freq_minutes = 60;
    std::vector<std::string> channel_names;
};

// Writes a single self-describing JSON document: format tag, dims, flags,
// every active parameter block in declared order, standardizer stats.
// Serialization is deterministic (ordered keys, shortest round-trip
// numbers), so identical models produce bit-identical files.
void save_checkpoint(const std::string& path, Model& model, const StandardizerStats& stats,
                     int freq_minutes, const std::vector<std::string>& channel_names);

// Rebuilds the model from a checkpoint file. A missing file, unparseable
// JSON, a wrong/unsupported format tag, or block shape drift raises
// DataError naming what failed.
Checkpoint load_checkpoint(const std::string& path);

} // namespace indexnet
