#include "indexnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "indexnet/errors.hpp"

namespace indexnet {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
        throw ConfigError("key '" + key + "' expects a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size() || value[0] == '-') {
        throw ConfigError("key '" + key + "' expects a non-negative integer, got '" + value +
                          "'");
    }
    return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = to_lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "' expects true/false, got '" + value + "'");
}

std::string format_double(double v) { return nlohmann::json(v).dump(); }

} // namespace

const std::vector<std::string>& config_key_names() {
    static const std::vector<std::string> keys = {
        "preset",     "data",        "out",        "split",      "train_end",
        "val_end",    "lookback",    "horizon",    "d_model",    "d_ff",
        "layers",     "t_dim",       "c_dim",      "te_enabled", "ce_enabled",
        "week_level", "month_level", "init_mode",  "lr",         "batch_size",
        "max_epochs", "patience",    "seed",       "workers",    "freq_minutes"};
    return keys;
}

ConfigEntries parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ConfigEntries entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + " of '" + path +
                              "' is not of the form key = value");
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return entries;
}

void apply_config_entry(RunConfig& rc, const std::string& key, const std::string& value) {
    TrainConfig& t = rc.train;
    if (key == "preset") {
        t = preset_config(to_lower(value));
        rc.preset = to_lower(value);
        rc.freq_set = true;
    } else if (key == "data") {
        rc.data_path = value;
    } else if (key == "out") {
        rc.out_dir = value;
    } else if (key == "split") {
        rc.split_name = to_lower(value);
    } else if (key == "train_end") {
        rc.train_end = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "val_end") {
        rc.val_end = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "lookback") {
        t.dims.lookback = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "horizon") {
        t.dims.horizon = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "d_model") {
        t.dims.d_model = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "d_ff") {
        t.dims.d_ff = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "layers") {
        t.dims.layers = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "t_dim") {
        t.dims.t_dim = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "c_dim") {
        t.dims.c_dim = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "te_enabled") {
        t.dims.te_enabled = parse_bool(key, value);
    } else if (key == "ce_enabled") {
        t.dims.ce_enabled = parse_bool(key, value);
    } else if (key == "week_level") {
        t.groups.week_level = parse_bool(key, value);
    } else if (key == "month_level") {
        t.groups.month_level = parse_bool(key, value);
    } else if (key == "init_mode") {
        const std::string v = to_lower(value);
        if (v == "zeros") {
            t.init_mode = InitMode::zeros;
        } else if (v == "random") {
            t.init_mode = InitMode::random_init;
        } else {
            throw ConfigError("key 'init_mode' expects zeros or random, got '" + value + "'");
        }
    } else if (key == "lr") {
        t.lr = parse_double(key, value);
        if (t.lr < 0) throw ConfigError("key 'lr' must be non-negative");
    } else if (key == "batch_size") {
        t.batch_size = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "max_epochs") {
        t.max_epochs = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "patience") {
        t.patience = static_cast<std::size_t>(parse_uint(key, value));
    } else if (key == "seed") {
        t.seed = parse_uint(key, value);
    } else if (key == "workers") {
        t.workers = static_cast<std::size_t>(parse_uint(key, value));
        if (t.workers == 0) throw ConfigError("key 'workers' must be at least 1");
    } else if (key == "freq_minutes") {
        t.freq_minutes = static_cast<int>(parse_uint(key, value));
        rc.freq_set = true;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void apply_config_entries(RunConfig& rc, const ConfigEntries& entries) {
    // The preset establishes the baseline, so it applies first no matter
    // where it sits in the file.
    for (const auto& [key, value] : entries) {
        if (key == "preset") apply_config_entry(rc, key, value);
    }
    std::string unknown;
    for (const auto& [key, value] : entries) {
        if (key == "preset") continue;
        try {
            apply_config_entry(rc, key, value);
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (msg.rfind("unknown config key", 0) == 0) {
                unknown += (unknown.empty() ? "" : ", ") + std::string("'") + key + "'";
            } else {
                throw;
            }
        }
    }
    if (!unknown.empty()) {
        throw ConfigError("unknown config keys: " + unknown);
    }
}

ConfigEntries resolved_entries(const RunConfig& rc) {
    const TrainConfig& t = rc.train;
    ConfigEntries out;
    if (!rc.preset.empty()) out.emplace_back("preset", rc.preset);
    out.emplace_back("data", rc.data_path);
    out.emplace_back("out", rc.out_dir);
    if (!rc.split_name.empty()) out.emplace_back("split", rc.split_name);
    if (rc.train_end != 0) out.emplace_back("train_end", std::to_string(rc.train_end));
    if (rc.val_end != 0) out.emplace_back("val_end", std::to_string(rc.val_end));
    out.emplace_back("lookback", std::to_string(t.dims.lookback));
    out.emplace_back("horizon", std::to_string(t.dims.horizon));
    out.emplace_back("d_model", std::to_string(t.dims.d_model));
    out.emplace_back("d_ff", std::to_string(t.dims.d_ff));
    out.emplace_back("layers", std::to_string(t.dims.layers));
    out.emplace_back("t_dim", std::to_string(t.dims.t_dim));
    out.emplace_back("c_dim", std::to_string(t.dims.c_dim));
    out.emplace_back("te_enabled", t.dims.te_enabled ? "true" : "false");
    out.emplace_back("ce_enabled", t.dims.ce_enabled ? "true" : "false");
    out.emplace_back("week_level", t.groups.week_level ? "true" : "false");
    out.emplace_back("month_level", t.groups.month_level ? "true" : "false");
    out.emplace_back("init_mode", t.init_mode == InitMode::zeros ? "zeros" : "random");
    out.emplace_back("lr", format_double(t.lr));
    out.emplace_back("batch_size", std::to_string(t.batch_size));
    out.emplace_back("max_epochs", std::to_string(t.max_epochs));
    out.emplace_back("patience", std::to_string(t.patience));
    out.emplace_back("seed", std::to_string(t.seed));
    out.emplace_back("workers", std::to_string(t.workers));
    if (rc.freq_set) out.emplace_back("freq_minutes", std::to_string(t.freq_minutes));
    return out;
}

} // namespace indexnet
