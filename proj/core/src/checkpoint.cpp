#include "indexnet/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "indexnet/errors.hpp"

namespace indexnet {

using nlohmann::ordered_json;

void save_checkpoint(const std::string& path, Model& model, const StandardizerStats& stats,
                     int freq_minutes, const std::vector<std::string>& channel_names) {
    const ModelDims& d = model.params.dims;
    ordered_json doc;
    doc["format"] = kCheckpointFormat;
    doc["dims"] = {{"lookback", d.lookback}, {"horizon", d.horizon},
                   {"d_model", d.d_model},   {"d_ff", d.d_ff},
                   {"layers", d.layers},     {"t_dim", d.t_dim},
                   {"c_dim", d.c_dim},       {"te_enabled", d.te_enabled},
                   {"ce_enabled", d.ce_enabled}};
    doc["groups"] = {{"week_level", model.tables.groups.week_level},
                     {"month_level", model.tables.groups.month_level}};
    doc["freq_minutes"] = freq_minutes;
    doc["channel_count"] = model.channels.identity.rows();
    doc["channel_names"] = channel_names;
    doc["standardizer"] = {{"mean", stats.mean}, {"std", stats.std_dev}};
    ordered_json params = ordered_json::object();
    for (const ParamBlock& b : param_blocks(model)) {
        params[b.name] = std::vector<double>(b.values, b.values + b.size);
    }
    doc["params"] = std::move(params);

    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint '" + path + "'");
    out << doc.dump(1) << "\n";
    if (!out) throw DataError("write failed for checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        const std::string format = doc.at("format").get<std::string>();
        if (format != kCheckpointFormat) {
            throw DataError("checkpoint '" + path + "' has format tag '" + format +
                            "'; this build reads '" + kCheckpointFormat + "'");
        }
        const auto& jd = doc.at("dims");
        ModelDims d;
        d.lookback = jd.at("lookback").get<std::size_t>();
        d.horizon = jd.at("horizon").get<std::size_t>();
        d.d_model = jd.at("d_model").get<std::size_t>();
        d.d_ff = jd.at("d_ff").get<std::size_t>();
        d.layers = jd.at("layers").get<std::size_t>();
        d.t_dim = jd.at("t_dim").get<std::size_t>();
        d.c_dim = jd.at("c_dim").get<std::size_t>();
        d.te_enabled = jd.at("te_enabled").get<bool>();
        d.ce_enabled = jd.at("ce_enabled").get<bool>();
        ActiveGroups groups;
        groups.week_level = doc.at("groups").at("week_level").get<bool>();
        groups.month_level = doc.at("groups").at("month_level").get<bool>();

        Checkpoint ck;
        ck.freq_minutes = doc.at("freq_minutes").get<int>();
        const std::size_t channels = doc.at("channel_count").get<std::size_t>();
        ck.channel_names = doc.at("channel_names").get<std::vector<std::string>>();
        ck.stats.mean = doc.at("standardizer").at("mean").get<std::vector<double>>();
        ck.stats.std_dev = doc.at("standardizer").at("std").get<std::vector<double>>();
        if (ck.stats.mean.size() != channels || ck.stats.std_dev.size() != channels) {
            throw DataError("checkpoint '" + path + "': standardizer length does not match " +
                            std::to_string(channels) + " channels");
        }

        ck.model.params = build_model(d);
        auto built = build_tables(ck.freq_minutes, std::max<std::size_t>(d.t_dim, 1), channels,
                                  std::max<std::size_t>(d.c_dim, 1), groups);
        ck.model.tables = std::move(built.first);
        ck.model.channels = std::move(built.second);

        const auto& jp = doc.at("params");
        std::size_t consumed = 0;
        for (const ParamBlock& b : param_blocks(ck.model)) {
            if (!jp.contains(b.name)) {
                throw DataError("checkpoint '" + path + "' is missing parameter block '" +
                                b.name + "'");
            }
            const auto vals = jp.at(b.name).get<std::vector<double>>();
            if (vals.size() != b.size) {
                throw DataError("checkpoint '" + path + "': block '" + b.name + "' has " +
                                std::to_string(vals.size()) + " values, expected " +
                                std::to_string(b.size));
            }
            std::copy(vals.begin(), vals.end(), b.values);
            ++consumed;
        }
        if (consumed != jp.size()) {
            throw DataError("checkpoint '" + path + "' contains " +
                            std::to_string(jp.size()) + " parameter blocks; this model uses " +
                            std::to_string(consumed));
        }
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("checkpoint '" + path + "' is malformed: " + e.what());
    }
}

} // namespace indexnet
