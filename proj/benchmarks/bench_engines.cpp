#include <benchmark/benchmark.h>

#include <random>

#include "deltacnn/deltacnn.hpp"

using namespace deltacnn;

namespace {

const NetworkSpec& seeded_net() {
    static const NetworkSpec net = [] {
        NetworkSpec n = reference_architecture();
        generate_weights(n, 1);
        return n;
    }();
    return net;
}

Tensor digit() {
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> dist(0.2f, 1.0f);
    Tensor small = Tensor::zeros({1, 28, 28});
    for (float& v : small.data()) v = dist(rng);
    return embed_centered(small, 64, 64);
}

void BM_DenseFrame(benchmark::State& state) {
    const Tensor frame = digit();
    for (auto _ : state) benchmark::DoNotOptimize(forward_dense(seeded_net(), frame));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DenseFrame)->Unit(benchmark::kMillisecond);

// Sequence of 10 frames; range(0) is the per-frame shift (0 = repeated).
void BM_DeltaSequence(benchmark::State& state) {
    const FrameSequence seq = gen_shift(digit(), 10, state.range(0));
    for (auto _ : state) {
        const RunMetrics m = run_sequence(seeded_net(), seq.frames, EngineMode::delta({}));
        state.counters["savings"] = compute_savings(m);
    }
    state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_DeltaSequence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DenseSequence(benchmark::State& state) {
    const FrameSequence seq = gen_shift(digit(), 10, 1);
    for (auto _ : state) benchmark::DoNotOptimize(run_sequence(seeded_net(), seq.frames, EngineMode::dense()));
    state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_DenseSequence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
