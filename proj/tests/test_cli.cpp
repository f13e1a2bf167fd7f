#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <indexnet/errors.hpp>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <thread>

#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string output;  // stdout + stderr
};

// Runs the installed binary through the shell, capturing combined output.
CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path capture = testsupport::make_temp_dir("indexnet-cli-out") /
                             ("capture-" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string("\"") + INDEXNET_CLI_PATH + "\" " + args + " > \"" +
                            capture.string() + "\" 2>&1";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.output = testsupport::read_file(capture);
    fs::remove_all(capture.parent_path());
    return r;
}

// A complete little training setup: dated CSV plus a config file.
struct TrainFixture {
    fs::path dir;
    fs::path csv;
    fs::path config;

    explicit TrainFixture(std::size_t rows = 200, std::size_t max_epochs = 2,
                          std::size_t patience = 5) {
        dir = testsupport::make_temp_dir("indexnet-cli");
        csv = dir / "series.csv";
        testsupport::write_file(csv, testsupport::hourly_csv(rows, 2));
        config = dir / "run.conf";
        testsupport::write_file(config,
                                "# tiny but complete run\n"
                                "lookback = 16\n"
                                "horizon = 4\n"
                                "d_model = 8\n"
                                "d_ff = 8\n"
                                "layers = 1\n"
                                "t_dim = 4\n"
                                "c_dim = 4\n"
                                "lr = 0.005\n"
                                "batch_size = 32\n"
                                "max_epochs = " + std::to_string(max_epochs) + "\n"
                                "patience = " + std::to_string(patience) + "\n"
                                "seed = 7\n");
    }
    ~TrainFixture() { fs::remove_all(dir); }

    std::string train_args(const std::string& out_name,
                           const std::string& extra = "") const {
        return "train --config \"" + config.string() + "\" --data \"" + csv.string() +
               "\" --out \"" + (dir / out_name).string() + "\"" +
               (extra.empty() ? "" : " " + extra);
    }
};

}  // namespace

TEST_CASE("help, version, and argument errors use the documented exits") {
    CHECK(run_cli("--help").code == 0);
    CliResult version = run_cli("--version");
    CHECK(version.code == 0);
    CHECK(version.output.find("indexnet 0.1.0") != std::string::npos);

    CliResult help = run_cli("--help");
    CHECK(help.output.find("train") != std::string::npos);
    CHECK(help.output.find("export-embeddings") != std::string::npos);

    CHECK(run_cli("").code == 2);                      // subcommand required
    CHECK(run_cli("train --bogus-flag 1").code == 2);  // unknown flag
    CHECK(run_cli("frobnicate").code == 2);            // unknown subcommand
}

TEST_CASE("train writes the full artifact set") {
    TrainFixture fx;
    CliResult r = run_cli(fx.train_args("run"));
    INFO(r.output);
    REQUIRE(r.code == 0);
    CHECK(r.output.find("final val MSE:") != std::string::npos);
    CHECK(r.output.find("checkpoint:") != std::string::npos);

    const fs::path out = fx.dir / "run";
    REQUIRE(fs::exists(out / "manifest.json"));
    REQUIRE(fs::exists(out / "config.resolved"));
    REQUIRE(fs::exists(out / "history.ndjson"));
    REQUIRE(fs::exists(out / "checkpoint.json"));

    json manifest = json::parse(testsupport::read_file(out / "manifest.json"));
    CHECK(manifest["format"] == "indexnet-manifest-v1");
    CHECK(manifest["command"] == "train");
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["dataset"]["fnv1a64"].get<std::string>().size() == 16);
    CHECK(manifest["config"]["lookback"] == "16");
    CHECK(manifest["metrics"]["epochs_run"] == 2);
    CHECK(manifest.contains("wall_clock_s"));

    // history.ndjson: one valid JSON object per epoch.
    std::ifstream hist(out / "history.ndjson");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(hist, line)) {
        json rec = json::parse(line);
        CHECK(rec["epoch"] == ++lines);
        CHECK(rec.contains("train_mse"));
        CHECK(rec.contains("val_mse"));
    }
    CHECK(lines == 2);

    // config.resolved replays byte-for-byte into the same run settings.
    const std::string resolved = testsupport::read_file(out / "config.resolved");
    CHECK(resolved.find("lookback = 16") != std::string::npos);
    CHECK(resolved.find("seed = 7") != std::string::npos);

    json ck = json::parse(testsupport::read_file(out / "checkpoint.json"));
    CHECK(ck["format"] == "indexnet-checkpoint-v1");
    CHECK(ck["channel_count"] == 2);
}

TEST_CASE("identical train invocations are bit-identical") {
    TrainFixture fx;
    REQUIRE(run_cli(fx.train_args("a")).code == 0);
    REQUIRE(run_cli(fx.train_args("b")).code == 0);

    CHECK(testsupport::read_file(fx.dir / "a" / "checkpoint.json") ==
          testsupport::read_file(fx.dir / "b" / "checkpoint.json"));

    json ma = json::parse(testsupport::read_file(fx.dir / "a" / "manifest.json"));
    json mb = json::parse(testsupport::read_file(fx.dir / "b" / "manifest.json"));
    CHECK(ma["metrics"]["best_val_mse"] == mb["metrics"]["best_val_mse"]);

    // A different seed must change the checkpoint.
    REQUIRE(run_cli(fx.train_args("c", "--seed 8")).code == 0);
    CHECK(testsupport::read_file(fx.dir / "a" / "checkpoint.json") !=
          testsupport::read_file(fx.dir / "c" / "checkpoint.json"));
}

TEST_CASE("config file errors exit with the usage code and name every key") {
    TrainFixture fx;
    testsupport::write_file(fx.config, "lookback = 16\nfoo = 1\nbar = 2\n");
    CliResult r = run_cli(fx.train_args("run"));
    CHECK(r.code == 2);
    CHECK(r.output.find("foo") != std::string::npos);
    CHECK(r.output.find("bar") != std::string::npos);

    testsupport::write_file(fx.config, "lookback\n");
    CHECK(run_cli(fx.train_args("run2")).code == 2);

    CHECK(run_cli("train --config /no/such/file.conf --data x.csv").code == 2);
}

TEST_CASE("missing datasets are data errors, and INDEXNET_DATA_DIR is searched") {
    TrainFixture fx;
    CliResult r = run_cli("train --config \"" + fx.config.string() +
                          "\" --data /definitely/missing.csv --out \"" +
                          (fx.dir / "x").string() + "\"");
    CHECK(r.code == 3);
    CHECK(r.output.find("missing.csv") != std::string::npos);

    // Same file referenced by name only, found through the environment root.
    const std::string env_cmd = "INDEXNET_DATA_DIR=\"" + fx.dir.string() + "\" ";
    const std::string args = "train --config \"" + fx.config.string() +
                             "\" --data series.csv --out \"" + (fx.dir / "env").string() +
                             "\"";
    static int counter = 0;
    const fs::path capture = fx.dir / ("env-capture-" + std::to_string(counter++));
    const int raw = std::system((env_cmd + "\"" + INDEXNET_CLI_PATH + "\" " + args + " > \"" +
                                 capture.string() + "\" 2>&1")
                                    .c_str());
    INFO(testsupport::read_file(capture));
    CHECK(WEXITSTATUS(raw) == 0);
}

TEST_CASE("eval reports metrics JSON and validates its arguments") {
    TrainFixture fx;
    REQUIRE(run_cli(fx.train_args("run")).code == 0);
    const std::string ck = (fx.dir / "run" / "checkpoint.json").string();

    CliResult r = run_cli("eval \"" + ck + "\" --data \"" + fx.csv.string() +
                          "\" --split test");
    INFO(r.output);
    REQUIRE(r.code == 0);
    json metrics = json::parse(r.output);
    CHECK(metrics.contains("mse"));
    CHECK(metrics.contains("mae"));
    CHECK(metrics["space"] == "standardized");
    CHECK(metrics["n_points"].get<std::size_t>() > 0);

    // Validation split works too and differs in point count.
    CliResult rv = run_cli("eval \"" + ck + "\" --data \"" + fx.csv.string() +
                           "\" --split val");
    REQUIRE(rv.code == 0);

    CHECK(run_cli("eval \"" + ck + "\" --data \"" + fx.csv.string() +
                  "\" --split nonsense")
              .code == 2);
    CHECK(run_cli("eval \"" + ck + "\" --data \"" + fx.csv.string() +
                  "\" --horizon 6")
              .code == 2);
    CHECK(run_cli("eval \"" + ck + "\"").code == 2);  // --data is required
    CHECK(run_cli("eval /no/such/checkpoint.json --data \"" + fx.csv.string() + "\"")
              .code == 3);
}

TEST_CASE("corrupt checkpoints are data errors") {
    TrainFixture fx;
    const fs::path bad = fx.dir / "bad-checkpoint.json";
    testsupport::write_file(bad, "{ this is not json");
    CHECK(run_cli("eval \"" + bad.string() + "\" --data \"" + fx.csv.string() + "\"")
              .code == 3);

    testsupport::write_file(bad, "{\"format\": \"something-else\"}");
    CliResult r = run_cli("eval \"" + bad.string() + "\" --data \"" + fx.csv.string() + "\"");
    CHECK(r.code == 3);
    CHECK(r.output.find("something-else") != std::string::npos);
}

TEST_CASE("export-embeddings writes the projection documents") {
    TrainFixture fx;
    REQUIRE(run_cli(fx.train_args("run")).code == 0);
    const std::string ck = (fx.dir / "run" / "checkpoint.json").string();
    const fs::path out = fx.dir / "emb";

    CliResult r = run_cli("export-embeddings \"" + ck + "\" --out \"" + out.string() + "\"");
    INFO(r.output);
    REQUIRE(r.code == 0);
    // Hourly data, week-level group: hour, dow, channel.
    CHECK(fs::exists(out / "hour.json"));
    CHECK(fs::exists(out / "dow.json"));
    CHECK(fs::exists(out / "channel.json"));
    CHECK_FALSE(fs::exists(out / "minute.json"));
    CHECK_FALSE(fs::exists(out / "dom.json"));

    json hour = json::parse(testsupport::read_file(out / "hour.json"));
    CHECK(hour["labels"].size() == 24);
    CHECK(hour["pca"]["evr"].size() == 3);
}

TEST_CASE("ablate writes incremental rows and a final manifest") {
    TrainFixture fx(200, 2);
    CliResult r = run_cli("ablate --config \"" + fx.config.string() + "\" --data \"" +
                          fx.csv.string() + "\" --out \"" + (fx.dir / "abl").string() + "\"");
    INFO(r.output);
    REQUIRE(r.code == 0);
    CHECK(r.output.find("case") != std::string::npos);

    const std::string csv = testsupport::read_file(fx.dir / "abl" / "ablation.csv");
    CHECK(csv.find("case,te,ce,mse,mae") == 0);
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n' ? 1 : 0;
    CHECK(rows == 5);  // header + 4 cases

    json manifest = json::parse(testsupport::read_file(fx.dir / "abl" / "manifest.json"));
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["metrics"].size() == 4);
    CHECK(manifest["metrics"][0]["te"] == false);
    CHECK(manifest["metrics"][3]["ce"] == true);
}

TEST_CASE("a killed ablation leaves the manifest incomplete") {
    // Long enough that four cases cannot finish before the kill lands.
    TrainFixture fx(400, 400, 400);
    const fs::path out = fx.dir / "abl";
    const fs::path pidfile = fx.dir / "pid";
    const std::string cmd = "\"" + std::string(INDEXNET_CLI_PATH) + "\" ablate --config \"" +
                            fx.config.string() + "\" --data \"" + fx.csv.string() +
                            "\" --out \"" + out.string() + "\" > /dev/null 2>&1 & echo $! > \"" +
                            pidfile.string() + "\"";
    REQUIRE(std::system(cmd.c_str()) == 0);

    // Wait for the run to get underway (manifest + csv header on disk).
    bool started = false;
    for (int i = 0; i < 200 && !started; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        started = fs::exists(out / "ablation.csv") && fs::exists(out / "manifest.json");
    }
    REQUIRE(started);
    std::this_thread::sleep_for(std::chrono::milliseconds(200));

    const long pid = std::stol(testsupport::read_file(pidfile));
    REQUIRE(pid > 1);
    ::kill(static_cast<pid_t>(pid), SIGKILL);
    std::this_thread::sleep_for(std::chrono::milliseconds(200));

    json manifest = json::parse(testsupport::read_file(out / "manifest.json"));
    if (manifest["status"] == "complete") {
        // The box outran a 1600-epoch ablation; nothing to assert then.
        WARN_MESSAGE(false, "ablation finished before the kill; skipping");
        return;
    }
    CHECK(manifest["status"] == "incomplete");
    CHECK_FALSE(manifest.contains("metrics"));
}
