#include "indexnet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include "indexnet/errors.hpp"

namespace indexnet {

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "etth1", "etth2", "ettm1", "ettm2", "weather", "solar", "electricity", "traffic"};
    return names;
}

TrainConfig preset_config(const std::string& name) {
    TrainConfig c;
    c.dims.lookback = 96;
    c.dims.horizon = 96;
    c.dims.t_dim = 16;
    c.dims.c_dim = 16;
    if (name == "etth1") {
        c.dims.d_model = 128; c.dims.d_ff = 128; c.dims.layers = 3;
        c.lr = 5e-4; c.freq_minutes = 60;
    } else if (name == "etth2") {
        c.dims.d_model = 128; c.dims.d_ff = 128; c.dims.layers = 2;
        c.lr = 5e-5; c.freq_minutes = 60;
    } else if (name == "ettm1" || name == "ettm2") {
        c.dims.d_model = 128; c.dims.d_ff = 128; c.dims.layers = 3;
        c.lr = 2e-4; c.freq_minutes = 15;
    } else if (name == "weather") {
        c.dims.d_model = 512; c.dims.d_ff = 512; c.dims.layers = 3;
        c.lr = 5e-4; c.freq_minutes = 10;
    } else if (name == "solar") {
        c.dims.d_model = 512; c.dims.d_ff = 512; c.dims.layers = 2;
        c.lr = 5e-4; c.freq_minutes = 10;
    } else if (name == "electricity") {
        c.dims.d_model = 512; c.dims.d_ff = 512; c.dims.layers = 3;
        c.lr = 1e-3; c.freq_minutes = 60;
    } else if (name == "traffic") {
        c.dims.d_model = 512; c.dims.d_ff = 1024; c.dims.layers = 3;
        c.dims.t_dim = 256; c.dims.c_dim = 256;
        c.lr = 1e-3; c.freq_minutes = 60;
        c.groups.month_level = true;
    } else {
        std::string known;
        for (const std::string& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return c;
}

namespace {

// RNG stream ids, kept distinct so seeding is independent per purpose.
constexpr std::uint64_t kStreamWeights = 0;
constexpr std::uint64_t kStreamTables = 1;
constexpr std::uint64_t kStreamShuffleBase = 1000;

Model build_model_state(const TimeSeriesDataset& ds, const TrainConfig& cfg) {
    Model m;
    m.params = build_model(cfg.dims);
    Rng wrng(cfg.seed, kStreamWeights);
    init_weights(m.params, wrng);
    auto built = build_tables(ds.freq_minutes, std::max<std::size_t>(cfg.dims.t_dim, 1),
                              ds.channels(), std::max<std::size_t>(cfg.dims.c_dim, 1),
                              cfg.groups);
    m.tables = std::move(built.first);
    m.channels = std::move(built.second);
    if (cfg.init_mode == InitMode::random_init) {
        Rng trng(cfg.seed, kStreamTables);
        randomize_tables(m.tables, m.channels, trng);
    }
    return m;
}

// One worker's share of a batch: forward/backward into its own model clone,
// returning the summed per-sample normalized MSE. grad_y_norm is scaled by
// 1/(T * batch_size) so accumulated gradients realize the batch-mean loss.
double run_chunk(Model& model, const std::vector<Window>& windows,
                 const std::vector<double>& sdata, std::size_t rows, std::size_t channels,
                 const std::size_t* sample_ids, std::size_t count, double grad_scale,
                 ForwardTrace& trace, bool with_grad) {
    const ModelDims& dims = model.params.dims;
    const std::size_t L = dims.lookback;
    const std::size_t T = dims.horizon;
    Vec grad_y(T);
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t id = sample_ids[s];
        const Window& w = windows[id / channels];
        const std::size_t c = id % channels;
        const double* series = sdata.data() + c * rows;
        forward(model.params, model.tables, model.channels, series + w.start, L,
                w.start_calendar, c + 1, trace);
        const double* target = series + w.start + L;
        double sample_loss = 0.0;
        for (std::size_t i = 0; i < T; ++i) {
            const double tn = (target[i] - trace.norm.mu) / trace.norm.sigma;
            const double diff = trace.y_norm[i] - tn;
            sample_loss += diff * diff;
            grad_y[i] = 2.0 * diff * grad_scale;
        }
        loss_sum += sample_loss / static_cast<double>(T);
        if (with_grad) {
            backward(model.params, model.tables, model.channels, trace, grad_y);
        }
    }
    return loss_sum;
}

void copy_values(const std::vector<ParamBlock>& from, const std::vector<ParamBlock>& to) {
    for (std::size_t b = 0; b < from.size(); ++b) {
        std::memcpy(to[b].values, from[b].values, from[b].size * sizeof(double));
    }
}

void add_grads(const std::vector<ParamBlock>& from, const std::vector<ParamBlock>& to) {
    for (std::size_t b = 0; b < from.size(); ++b) {
        for (std::size_t i = 0; i < from[b].size; ++i) to[b].grads[i] += from[b].grads[i];
    }
}

} // namespace

TrainResult train(const TimeSeriesDataset& ds, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
    if (cfg.batch_size == 0 || cfg.max_epochs == 0) {
        throw ConfigError("batch_size and max_epochs must be positive");
    }
    const std::size_t workers = std::max<std::size_t>(cfg.workers, 1);
    const std::vector<Window> train_w = make_windows(ds, Split::train, cfg.dims.lookback,
                                                     cfg.dims.horizon);
    const std::vector<Window> val_w = make_windows(ds, Split::val, cfg.dims.lookback,
                                                   cfg.dims.horizon);
    if (train_w.empty()) throw DataError("no training windows; split too short");
    if (val_w.empty()) throw DataError("no validation windows; split too short");

    TrainResult result;
    result.stats = StandardizerStats::fit(ds, ds.splits.train_end);
    const std::vector<double> sdata = standardized_channel_major(ds, result.stats);
    const std::size_t rows = ds.rows();
    const std::size_t channels = ds.channels();

    Model model = build_model_state(ds, cfg);
    std::vector<ParamBlock> blocks = param_blocks(model);
    Adam adam({cfg.lr, 0.9, 0.999, 1e-8});

    // Per-worker clones accumulate gradients privately; the primary model
    // merges them in worker order, so results depend only on the worker
    // count, never on scheduling.
    std::vector<Model> clones;
    std::vector<std::vector<ParamBlock>> clone_blocks;
    if (workers > 1) {
        clones.assign(workers, model);
        for (Model& m : clones) clone_blocks.push_back(param_blocks(m));
    }
    std::vector<ForwardTrace> traces(workers);

    const std::size_t n_samples = train_w.size() * channels;
    const std::size_t n_val = val_w.size() * channels;
    std::vector<std::size_t> order(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;

    auto parallel_pass = [&](const std::vector<Window>& windows, const std::size_t* ids,
                             std::size_t count, double grad_scale, bool with_grad) -> double {
        if (workers == 1 || count < 2 * workers) {
            return run_chunk(model, windows, sdata, rows, channels, ids, count, grad_scale,
                             traces[0], with_grad);
        }
        std::vector<double> losses(workers, 0.0);
        std::vector<std::thread> pool;
        const std::size_t per = (count + workers - 1) / workers;
        for (std::size_t wk = 0; wk < workers; ++wk) {
            const std::size_t lo = wk * per;
            const std::size_t hi = std::min(count, lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, wk, lo, hi] {
                Model& m = clones[wk];
                if (with_grad) {
                    for (const ParamBlock& b : clone_blocks[wk]) {
                        std::memset(b.grads, 0, b.size * sizeof(double));
                    }
                }
                losses[wk] = run_chunk(m, windows, sdata, rows, channels, ids + lo, hi - lo,
                                       grad_scale, traces[wk], with_grad);
            });
        }
        for (std::thread& th : pool) th.join();
        if (with_grad) {
            for (std::size_t wk = 0; wk < workers; ++wk) add_grads(clone_blocks[wk], blocks);
        }
        double total = 0.0;
        for (double l : losses) total += l;
        return total;
    };

    std::vector<std::size_t> val_ids(n_val);
    for (std::size_t i = 0; i < n_val; ++i) val_ids[i] = i;

    double best_val = std::numeric_limits<double>::infinity();
    Model best_model = model;
    std::size_t since_improve = 0;
    const double horizon_d = static_cast<double>(cfg.dims.horizon);

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng shuffle_rng(cfg.seed, kStreamShuffleBase + epoch);
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t batch_no = 0;
        for (std::size_t lo = 0; lo < n_samples; lo += cfg.batch_size, ++batch_no) {
            const std::size_t hi = std::min(n_samples, lo + cfg.batch_size);
            const std::size_t bsz = hi - lo;
            zero_grads(model);
            for (std::size_t wk = 0; wk < clones.size(); ++wk) copy_values(blocks, clone_blocks[wk]);
            const double grad_scale = 1.0 / (horizon_d * static_cast<double>(bsz));
            const double batch_loss =
                parallel_pass(train_w, order.data() + lo, bsz, grad_scale, true);
            if (!std::isfinite(batch_loss)) {
                throw NumericError("non-finite training loss at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_no));
            }
            epoch_loss += batch_loss;
            adam.step(blocks);
        }

        // Validation in the same (instance-normalized) space as the loss.
        for (std::size_t wk = 0; wk < clones.size(); ++wk) copy_values(blocks, clone_blocks[wk]);
        const double val_loss = parallel_pass(val_w, val_ids.data(), n_val, 0.0, false);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_mse = epoch_loss / static_cast<double>(n_samples);
        rec.val_mse = val_loss / static_cast<double>(n_val);
        rec.elapsed_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.push_back(rec);
        if (on_epoch) on_epoch(rec);

        if (rec.val_mse < best_val) {
            best_val = rec.val_mse;
            best_model = model;
            result.best_epoch = epoch;
            since_improve = 0;
        } else if (++since_improve >= cfg.patience) {
            break;
        }
    }

    result.model = std::move(best_model);
    result.best_val_mse = best_val;
    return result;
}

MetricsReport evaluate(Model& model, const StandardizerStats& stats,
                       const TimeSeriesDataset& ds, Split split, std::size_t horizon,
                       std::size_t workers) {
    const ModelDims& dims = model.params.dims;
    if (horizon != dims.horizon) {
        throw ConfigError("requested horizon " + std::to_string(horizon) +
                          " does not match the checkpoint's horizon " +
                          std::to_string(dims.horizon));
    }
    if (ds.channels() != model.channels.identity.rows()) {
        throw ConfigError("dataset has " + std::to_string(ds.channels()) +
                          " channels but the checkpoint was built for " +
                          std::to_string(model.channels.identity.rows()));
    }
    const std::vector<Window> windows = make_windows(ds, split, dims.lookback, horizon);
    if (windows.empty()) throw DataError("selected split yields no evaluation windows");

    const std::vector<double> sdata = standardized_channel_major(ds, stats);
    const std::size_t rows = ds.rows();
    const std::size_t channels = ds.channels();
    const std::size_t L = dims.lookback;
    const std::size_t n_points = windows.size() * channels * horizon;
    std::vector<double> pred(n_points), truth(n_points);

    auto eval_range = [&](std::size_t w_lo, std::size_t w_hi, ForwardTrace& trace) {
        for (std::size_t w = w_lo; w < w_hi; ++w) {
            for (std::size_t c = 0; c < channels; ++c) {
                const double* series = sdata.data() + c * rows;
                const Vec y = forward(model.params, model.tables, model.channels,
                                      series + windows[w].start, L,
                                      windows[w].start_calendar, c + 1, trace);
                double* p = pred.data() + (w * channels + c) * horizon;
                std::memcpy(p, y.data(), horizon * sizeof(double));
                std::memcpy(truth.data() + (w * channels + c) * horizon,
                            series + windows[w].start + L, horizon * sizeof(double));
            }
        }
    };

    const std::size_t nw = std::max<std::size_t>(std::min(workers, windows.size()), 1);
    if (nw == 1) {
        ForwardTrace trace;
        eval_range(0, windows.size(), trace);
    } else {
        std::vector<std::thread> pool;
        std::vector<ForwardTrace> traces(nw);
        const std::size_t per = (windows.size() + nw - 1) / nw;
        for (std::size_t wk = 0; wk < nw; ++wk) {
            const std::size_t lo = wk * per;
            const std::size_t hi = std::min(windows.size(), lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, wk, lo, hi] { eval_range(lo, hi, traces[wk]); });
        }
        for (std::thread& th : pool) th.join();
    }
    return compute_metrics(pred, truth, "standardized");
}

std::array<AblationCase, 4> ablation_run(
    const TimeSeriesDataset& ds, const TrainConfig& cfg,
    const std::function<void(const AblationCase&)>& on_case) {
    static const bool kTe[4] = {false, false, true, true};
    static const bool kCe[4] = {false, true, false, true};
    std::array<AblationCase, 4> out;
    for (int i = 0; i < 4; ++i) {
        TrainConfig variant = cfg;
        variant.dims.te_enabled = kTe[i];
        variant.dims.ce_enabled = kCe[i];
        TrainResult r = train(ds, variant);
        out[i].case_id = i + 1;
        out[i].te = kTe[i];
        out[i].ce = kCe[i];
        out[i].test_metrics = evaluate(r.model, r.stats, ds, Split::test,
                                       variant.dims.horizon, cfg.workers);
        if (on_case) on_case(out[i]);
    }
    return out;
}

} // namespace indexnet
