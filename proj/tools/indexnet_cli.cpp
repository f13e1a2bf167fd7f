// indexnet: train / eval / ablate / export-embeddings over CSV time series.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data error,
// 4 numeric failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "indexnet/checkpoint.hpp"
#include "indexnet/config.hpp"
#include "indexnet/dataset.hpp"
#include "indexnet/errors.hpp"
#include "indexnet/pca.hpp"
#include "indexnet/train.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace indexnet;

namespace {

constexpr const char* kVersion = "indexnet 0.1.0";

std::string num(double v) { return nlohmann::json(v).dump(); }

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// --data paths that don't exist as given are retried under INDEXNET_DATA_DIR.
std::string resolve_data_path(const std::string& given) {
    if (given.empty()) throw ConfigError("no dataset given; pass --data or a config 'data' key");
    if (fs::exists(given)) return given;
    const char* root = std::getenv("INDEXNET_DATA_DIR");
    if (root != nullptr && *root != '\0') {
        const fs::path candidate = fs::path(root) / given;
        if (fs::exists(candidate)) return candidate.string();
        throw DataError("dataset '" + given + "' not found (also tried '" +
                        candidate.string() + "' via INDEXNET_DATA_DIR)");
    }
    throw DataError("dataset '" + given + "' not found (set INDEXNET_DATA_DIR to a dataset "
                    "root to search there too)");
}

// Border scheme: explicit split name, else the preset, else the file stem
// (so ETTh1.csv gets the canonical ETTh1 borders), else the ratio fallback.
std::string border_name(const RunConfig& rc, const std::string& data_path) {
    if (!rc.split_name.empty()) return rc.split_name;
    if (!rc.preset.empty()) return rc.preset;
    return to_lower(fs::path(data_path).stem().string());
}

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string data;
    std::string out;
    std::string split;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t workers = 0;
    std::size_t horizon = 0;
};

void add_run_flags(CLI::App* cmd, CommonFlags& f, bool with_out) {
    cmd->add_option("--config", f.config_path, "flat key = value config file");
    cmd->add_option("--preset", f.preset,
                    "per-dataset defaults: etth1, etth2, ettm1, ettm2, weather, solar, "
                    "electricity, traffic");
    cmd->add_option("--data", f.data, "dataset CSV (INDEXNET_DATA_DIR is searched too)");
    if (with_out) cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--split", f.split, "border scheme name (etth1, ettm1, ... or auto)");
    cmd->add_option("--seed", f.seed, "RNG seed")->each([&f](const std::string&) {
        f.seed_given = true;
    });
    cmd->add_option("--workers", f.workers, "parallel workers (default 1, deterministic)");
    cmd->add_option("--horizon", f.horizon, "forecast horizon T");
}

RunConfig assemble_run_config(const CommonFlags& f) {
    RunConfig rc;
    ConfigEntries entries;
    if (!f.config_path.empty()) entries = parse_config_file(f.config_path);
    if (!f.preset.empty()) {
        // A --preset flag outranks the file's preset but still applies first,
        // so file keys refine it.
        apply_config_entry(rc, "preset", f.preset);
        ConfigEntries rest;
        for (const auto& e : entries) {
            if (e.first != "preset") rest.push_back(e);
        }
        apply_config_entries(rc, rest);
    } else {
        apply_config_entries(rc, entries);
    }
    if (!f.data.empty()) rc.data_path = f.data;
    if (!f.out.empty()) rc.out_dir = f.out;
    if (!f.split.empty()) rc.split_name = to_lower(f.split);
    if (f.seed_given) rc.train.seed = f.seed;
    if (f.workers != 0) rc.train.workers = f.workers;
    if (f.horizon != 0) rc.train.dims.horizon = f.horizon;
    return rc;
}

TimeSeriesDataset load_run_dataset(RunConfig& rc, std::string& resolved_path) {
    resolved_path = resolve_data_path(rc.data_path);
    TimeSeriesDataset ds = load_csv(resolved_path, rc.freq_set ? rc.train.freq_minutes : 0);
    rc.train.freq_minutes = ds.freq_minutes;
    rc.freq_set = true;
    ds.splits = resolve_splits(border_name(rc, resolved_path), ds.rows(), rc.train_end,
                               rc.val_end);
    return ds;
}

ordered_json config_json(const RunConfig& rc) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : resolved_entries(rc)) j[k] = v;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void write_manifest(const fs::path& path, const std::string& command, const RunConfig& rc,
                    const std::string& data_path, const std::string& status,
                    double wall_clock_s, const ordered_json& metrics) {
    ordered_json m;
    m["format"] = "indexnet-manifest-v1";
    m["command"] = command;
    m["version"] = kVersion;
    m["status"] = status;
    m["seed"] = rc.train.seed;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(data_path)));
    m["dataset"] = {{"path", data_path}, {"fnv1a64", std::string(hash)}};
    m["config"] = config_json(rc);
    if (status == "complete") {
        m["wall_clock_s"] = wall_clock_s;
        m["metrics"] = metrics;
    }
    write_text(path, m.dump(2) + "\n");
}

std::string resolved_text(const RunConfig& rc) {
    std::string text;
    for (const auto& [k, v] : resolved_entries(rc)) text += k + " = " + v + "\n";
    return text;
}

ordered_json metrics_json(const MetricsReport& r) {
    ordered_json j;
    j["mse"] = r.mse;
    j["mae"] = r.mae;
    j["mape"] = r.mape;
    j["rmse"] = r.rmse;
    j["n_points"] = r.n_points;
    j["mape_skipped"] = r.mape_skipped;
    j["space"] = r.space;
    return j;
}

int cmd_train(const CommonFlags& flags) {
    RunConfig rc = assemble_run_config(flags);
    std::string data_path;
    TimeSeriesDataset ds = load_run_dataset(rc, data_path);

    fs::create_directories(rc.out_dir);
    const fs::path out(rc.out_dir);
    write_text(out / "config.resolved", resolved_text(rc));
    write_manifest(out / "manifest.json", "train", rc, data_path, "incomplete", 0.0, {});

    std::ofstream history(out / "history.ndjson");
    if (!history) throw DataError("cannot write '" + (out / "history.ndjson").string() + "'");
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult result = train(ds, rc.train, [&history](const EpochRecord& rec) {
        ordered_json line;
        line["epoch"] = rec.epoch;
        line["train_mse"] = rec.train_mse;
        line["val_mse"] = rec.val_mse;
        line["elapsed_s"] = rec.elapsed_s;
        history << line.dump() << "\n" << std::flush;
    });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    save_checkpoint((out / "checkpoint.json").string(), result.model, result.stats,
                    ds.freq_minutes, ds.channel_names);
    ordered_json metrics;
    metrics["best_val_mse"] = result.best_val_mse;
    metrics["best_epoch"] = result.best_epoch;
    metrics["epochs_run"] = result.history.size();
    write_manifest(out / "manifest.json", "train", rc, data_path, "complete", wall, metrics);

    std::cout << "checkpoint: " << (out / "checkpoint.json").string() << "\n";
    std::cout << "final val MSE: " << num(result.best_val_mse) << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const CommonFlags& flags,
             const std::string& segment) {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    RunConfig rc;
    if (!flags.preset.empty()) rc.preset = to_lower(flags.preset);
    rc.data_path = flags.data;
    const std::string data_path = resolve_data_path(rc.data_path);
    TimeSeriesDataset ds = load_csv(data_path, ck.freq_minutes);
    ds.splits = resolve_splits(border_name(rc, data_path), ds.rows(), 0, 0);

    Split split;
    const std::string seg = to_lower(segment);
    if (seg == "train") {
        split = Split::train;
    } else if (seg == "val") {
        split = Split::val;
    } else if (seg == "test") {
        split = Split::test;
    } else {
        throw ConfigError("--split must be train, val, or test; got '" + segment + "'");
    }
    const std::size_t horizon =
        flags.horizon != 0 ? flags.horizon : ck.model.params.dims.horizon;
    const std::size_t workers = flags.workers != 0 ? flags.workers : 1;
    const MetricsReport report = evaluate(ck.model, ck.stats, ds, split, horizon, workers);
    std::cout << metrics_json(report).dump(2) << "\n";
    return 0;
}

int cmd_ablate(const CommonFlags& flags) {
    RunConfig rc = assemble_run_config(flags);
    std::string data_path;
    TimeSeriesDataset ds = load_run_dataset(rc, data_path);

    fs::create_directories(rc.out_dir);
    const fs::path out(rc.out_dir);
    write_text(out / "config.resolved", resolved_text(rc));
    write_manifest(out / "manifest.json", "ablate", rc, data_path, "incomplete", 0.0, {});

    std::ofstream csv(out / "ablation.csv");
    if (!csv) throw DataError("cannot write '" + (out / "ablation.csv").string() + "'");
    csv << "case,te,ce,mse,mae\n" << std::flush;

    const auto t0 = std::chrono::steady_clock::now();
    ordered_json metrics = ordered_json::array();
    const auto cases = ablation_run(ds, rc.train, [&](const AblationCase& c) {
        csv << c.case_id << "," << (c.te ? "true" : "false") << ","
            << (c.ce ? "true" : "false") << "," << num(c.test_metrics.mse) << ","
            << num(c.test_metrics.mae) << "\n"
            << std::flush;
    });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cout << "case  te     ce     test_mse      test_mae\n";
    for (const AblationCase& c : cases) {
        ordered_json row;
        row["case"] = c.case_id;
        row["te"] = c.te;
        row["ce"] = c.ce;
        row["mse"] = c.test_metrics.mse;
        row["mae"] = c.test_metrics.mae;
        metrics.push_back(row);
        std::printf("%-5d %-6s %-6s %-13.6f %-13.6f\n", c.case_id, c.te ? "on" : "off",
                    c.ce ? "on" : "off", c.test_metrics.mse, c.test_metrics.mae);
    }
    write_manifest(out / "manifest.json", "ablate", rc, data_path, "complete", wall, metrics);
    return 0;
}

int cmd_export(const std::string& checkpoint_path, const std::string& out_dir) {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    const std::vector<std::string> paths = export_embeddings(ck.model, out_dir);
    for (const std::string& p : paths) std::cout << p << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timestamp- and channel-embedding forecaster for multivariate time series"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonFlags train_flags;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
    add_run_flags(train_cmd, train_flags, true);

    CommonFlags eval_flags;
    std::string eval_checkpoint;
    std::string eval_segment = "test";
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on one split");
    eval_cmd->add_option("checkpoint", eval_checkpoint, "checkpoint.json from train")
        ->required();
    eval_cmd->add_option("--data", eval_flags.data, "dataset CSV")->required();
    eval_cmd->add_option("--preset", eval_flags.preset, "border scheme name override");
    eval_cmd->add_option("--split", eval_segment, "train, val, or test (default test)");
    eval_cmd->add_option("--horizon", eval_flags.horizon, "must match the checkpoint");
    eval_cmd->add_option("--workers", eval_flags.workers, "parallel workers");

    CommonFlags ablate_flags;
    CLI::App* ablate_cmd =
        app.add_subcommand("ablate", "train/evaluate the 4 embedding on/off variants");
    add_run_flags(ablate_cmd, ablate_flags, true);

    std::string export_checkpoint;
    std::string export_out = "embeddings";
    CLI::App* export_cmd = app.add_subcommand(
        "export-embeddings", "write per-table embedding rows and 3-component projections");
    export_cmd->add_option("checkpoint", export_checkpoint, "checkpoint.json from train")
        ->required();
    export_cmd->add_option("--out", export_out, "output directory (default embeddings)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_flags);
        if (eval_cmd->parsed()) return cmd_eval(eval_checkpoint, eval_flags, eval_segment);
        if (ablate_cmd->parsed()) return cmd_ablate(ablate_flags);
        if (export_cmd->parsed()) return cmd_export(export_checkpoint, export_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
