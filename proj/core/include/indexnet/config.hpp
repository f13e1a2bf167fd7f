#pragma once

#include <string>
#include <utility>
#include <vector>

#include "indexnet/train.hpp"

namespace indexnet {

// One run's full wiring: the training hyperparameters plus dataset
// location, split selection, and output directory. Precedence when
// assembling: defaults < preset < config file < command-line flags.
struct RunConfig {
    TrainConfig train;
    std::string preset;     // name of the applied preset, "" if none
    std::string data_path;
    std::string split_name; // borders by name; "" falls back to preset, then ratios
    std::size_t train_end = 0; // nonzero overrides the named borders
    std::size_t val_end = 0;
    std::string out_dir = "run";
    bool freq_set = false;  // whether freq_minutes was given (preset or key)
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Flat `key = value` lines; '#' starts a comment, blank lines are skipped.
// A line without '=' raises ConfigError naming the line number.
ConfigEntries parse_config_file(const std::string& path);

// Applies one key. Unknown keys and unparseable values raise ConfigError
// naming them. `preset` replaces the hyperparameters with the named
// dataset's defaults.
void apply_config_entry(RunConfig& rc, const std::string& key, const std::string& value);

// Applies a whole file: the preset key (wherever it appears) first, then
// the rest in order. All unknown keys are collected into one ConfigError.
void apply_config_entries(RunConfig& rc, const ConfigEntries& entries);

// The fully resolved configuration as flat entries, every key present, in
// a fixed order. Written next to run outputs so a run can be replayed
// bit-identically from its own record.
ConfigEntries resolved_entries(const RunConfig& rc);

// Documented keys, for help text.
const std::vector<std::string>& config_key_names();

} // namespace indexnet
