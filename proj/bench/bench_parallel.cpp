// OpenMP kernels against their serial twins.

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "smkl/datagen.hpp"
#include "smkl/diagnostics.hpp"
#include "smkl/objective.hpp"
#include "smkl/oracles.hpp"

using namespace smkl;

namespace {

KernelSpec rbf_spec() {
    KernelSpec s;
    s.id = "rbf";
    s.family = KernelFamily::rbf;
    s.bandwidth = 1.5;
    return s;
}

const Matrix& features(Index n) {
    static std::map<Index, Matrix> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::mt19937_64 rng(1);
        it = cache.emplace(n, fixtures::gaussian_matrix(rng, n, 10)).first;
    }
    return it->second;
}

const datagen::Instance& instance(std::size_t n, std::size_t m) {
    static std::map<std::pair<std::size_t, std::size_t>, datagen::Instance> cache;
    auto it = cache.find({n, m});
    if (it == cache.end()) {
        datagen::SyntheticSpec spec;
        spec.structure = datagen::Structure::random_rbf_bank;
        spec.n_samples = n;
        spec.n_kernels = m;
        spec.true_support_size = 3;
        it = cache.emplace(std::pair{n, m}, datagen::generate(spec)).first;
    }
    return it->second;
}

void BM_Gram(benchmark::State& state) {
    const Matrix& x = features(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gram(rbf_spec(), x));
}

void BM_GramSerial(benchmark::State& state) {
    const Matrix& x = features(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gram_serial(rbf_spec(), x));
}

void BM_Scores(benchmark::State& state) {
    const auto& inst = instance(200, static_cast<std::size_t>(state.range(0)));
    const Vector r = -inst.data.labels;
    for (auto _ : state) {
        benchmark::DoNotOptimize(objective::functional_scores(inst.bank, r));
        benchmark::DoNotOptimize(objective::l2_scores(inst.bank, r));
    }
}

void BM_ScoresSerial(benchmark::State& state) {
    const auto& inst = instance(200, static_cast<std::size_t>(state.range(0)));
    const Vector r = -inst.data.labels;
    for (auto _ : state) {
        benchmark::DoNotOptimize(objective::functional_scores_serial(inst.bank, r));
        benchmark::DoNotOptimize(objective::l2_scores_serial(inst.bank, r));
    }
}

void BM_Delta(benchmark::State& state) {
    const auto& inst = instance(100, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(diagnostics::dependency_report(inst.bank, 2));
}

void BM_DeltaSerial(benchmark::State& state) {
    const auto& inst = instance(100, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(diagnostics::dependency_report_serial(inst.bank, 2));
}

void BM_Probe(benchmark::State& state) {
    const auto& inst = instance(100, 10);
    for (auto _ : state)
        benchmark::DoNotOptimize(diagnostics::gamma_probe(inst.bank, {0, 1, 2, 3}, state.range(0), 7));
}

void BM_ProbeSerial(benchmark::State& state) {
    const auto& inst = instance(100, 10);
    for (auto _ : state)
        benchmark::DoNotOptimize(diagnostics::gamma_probe_serial(inst.bank, {0, 1, 2, 3}, state.range(0), 7));
}

void BM_BestSubset(benchmark::State& state) {
    const auto& inst = instance(60, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(oracles::best_subset(inst.bank, inst.data.labels, 3));
}

void BM_BestSubsetSerial(benchmark::State& state) {
    const auto& inst = instance(60, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(oracles::best_subset_serial(inst.bank, inst.data.labels, 3));
}

void BM_BankBuild(benchmark::State& state) {
    const auto& inst = instance(150, static_cast<std::size_t>(state.range(0)));
    std::vector<GramMatrix> grams;
    for (std::size_t j = 0; j < inst.bank.size(); ++j) grams.push_back({inst.bank.id(j), inst.bank.gram(j)});
    for (auto _ : state) benchmark::DoNotOptimize(KernelBank::from_grams(grams));
}

void BM_BankBuildSerial(benchmark::State& state) {
    const auto& inst = instance(150, static_cast<std::size_t>(state.range(0)));
    std::vector<GramMatrix> grams;
    for (std::size_t j = 0; j < inst.bank.size(); ++j) grams.push_back({inst.bank.id(j), inst.bank.gram(j)});
    for (auto _ : state) benchmark::DoNotOptimize(KernelBank::from_grams_serial(grams));
}

}  // namespace

BENCHMARK(BM_Gram)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramSerial)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Scores)->Arg(20)->Arg(50)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScoresSerial)->Arg(20)->Arg(50)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Delta)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeltaSerial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Probe)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbeSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BestSubset)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BestSubsetSerial)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BankBuild)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BankBuildSerial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
