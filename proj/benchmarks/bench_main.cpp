#include "lazylearn/gating.hpp"
#include "lazylearn/model.hpp"
#include "lazylearn/rng.hpp"
#include "lazylearn/toy.hpp"
#include "lazylearn/trainer.hpp"

#include <benchmark/benchmark.h>

using namespace lazylearn;

namespace {

Dataset random_images(std::int64_t n, Eigen::Index dims, int classes, std::uint64_t seed) {
    Dataset data;
    data.n_classes = classes;
    data.features.resize(static_cast<Eigen::Index>(n), dims);
    data.labels.resize(static_cast<std::size_t>(n));
    data.sample_ids.resize(static_cast<std::size_t>(n));
    auto eng = make_engine(seed, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (Eigen::Index d = 0; d < dims; ++d) {
            data.features(static_cast<Eigen::Index>(i), d) = uniform_unit(eng);
        }
        data.labels[static_cast<std::size_t>(i)] = static_cast<int>(uniform_below(eng, classes));
        data.sample_ids[static_cast<std::size_t>(i)] = i;
    }
    return data;
}

void BM_ForwardMlp(benchmark::State& state) {
    const auto hidden = static_cast<Eigen::Index>(state.range(0));
    const MlpModel m = init_mlp(784, hidden, 10, 1);
    Eigen::VectorXd x(784);
    auto eng = make_engine(2, 0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = uniform_unit(eng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward_mlp(m, x).output);
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_TrainStepBackprop(benchmark::State& state) {
    const auto hidden = static_cast<Eigen::Index>(state.range(0));
    MlpModel m = init_mlp(784, hidden, 10, 1);
    const Dataset data = random_images(256, 784, 10, 3);
    UpdateGate gate(GateKind::backprop, data.size());
    EnergyLedger ledger(flatten_params(m), data.size());
    std::int64_t row = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_step(m, gate, ledger, data, row, 0.01));
        row = (row + 1) % data.size();
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_Evaluate(benchmark::State& state) {
    const auto n = state.range(0);
    const MlpModel m = init_mlp(784, 100, 10, 1);
    const Dataset data = random_images(n, 784, 10, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(m, data));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_ToyEpoch(benchmark::State& state) {
    ToyTaskSpec spec;
    const Dataset data = make_two_clouds(spec);
    for (auto _ : state) {
        LinearToyModel m;
        m.w << -1.2, 2.0;
        UpdateGate gate(GateKind::pure_lazy, data.size());
        EnergyLedger ledger(flatten_params(m), data.size());
        for (const auto row : shuffled_order(data.size(), 0, 1)) {
            train_step(m, gate, ledger, data, row, 0.001);
        }
        benchmark::DoNotOptimize(ledger.m_total());
    }
    state.SetItemsProcessed(state.iterations() * data.size());
}

} // namespace

BENCHMARK(BM_ForwardMlp)->Arg(100)->Arg(500)->Arg(1000);
BENCHMARK(BM_TrainStepBackprop)->Arg(100)->Arg(500);
BENCHMARK(BM_Evaluate)->Arg(2048)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ToyEpoch);

BENCHMARK_MAIN();
