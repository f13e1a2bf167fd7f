// Microbenchmarks for the per-sample hot path at the hourly-benchmark shape
// (L = 96, T = 96, d_model = d_ff = 128, 3 blocks, 16-dim embeddings).

#include <benchmark/benchmark.h>

#include <indexnet/adam.hpp>
#include <indexnet/calendar.hpp>
#include <indexnet/embedding.hpp>
#include <indexnet/forecaster.hpp>
#include <indexnet/rng.hpp>

using namespace indexnet;

namespace {

struct Fixture {
    Model model;
    Vec input;
    CalendarFields cal;

    Fixture() {
        ModelDims dims;  // defaults are already the benchmark shape
        model.params = build_model(dims);
        auto [ts, ch] = build_tables(60, dims.t_dim, 7, dims.c_dim, ActiveGroups{});
        model.tables = std::move(ts);
        model.channels = std::move(ch);
        Rng wrng(1, 0);
        init_weights(model.params, wrng);
        Rng trng(1, 1);
        randomize_tables(model.tables, model.channels, trng);

        Rng xrng(2, 0);
        input.resize(dims.lookback);
        for (auto& v : input) v = xrng.uniform(-1, 1);
        cal = index_proxy_features(1234, 60);
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

void BM_Forward(benchmark::State& state) {
    Fixture& f = fixture();
    ForwardTrace trace;
    for (auto _ : state) {
        Vec y = forward(f.model.params, f.model.tables, f.model.channels, f.input.data(),
                        f.input.size(), f.cal, 1, trace);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_Forward);

void BM_ForwardBackward(benchmark::State& state) {
    Fixture& f = fixture();
    ForwardTrace trace;
    Vec grad_y(f.model.params.dims.horizon, 1.0);
    for (auto _ : state) {
        (void)forward(f.model.params, f.model.tables, f.model.channels, f.input.data(),
                      f.input.size(), f.cal, 1, trace);
        backward(f.model.params, f.model.tables, f.model.channels, trace, grad_y);
        benchmark::DoNotOptimize(trace.y_norm.data());
    }
}
BENCHMARK(BM_ForwardBackward);

void BM_AdamStep(benchmark::State& state) {
    Fixture& f = fixture();
    auto blocks = param_blocks(f.model);
    Adam opt(AdamConfig{});
    for (auto _ : state) {
        opt.step(blocks);
        benchmark::DoNotOptimize(blocks.front().values);
    }
}
BENCHMARK(BM_AdamStep);

void BM_EmbeddingRetrieval(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state) {
        IndexVectors iv = retrieve(f.model.tables, f.model.channels, f.cal, 3);
        benchmark::DoNotOptimize(iv.e_w.data());
    }
}
BENCHMARK(BM_EmbeddingRetrieval);

}  // namespace

BENCHMARK_MAIN();
