#include "vinemeta/likelihood.hpp"
#include "vinemeta/simstudy.hpp"

#include <benchmark/benchmark.h>

using namespace vinemeta;

static std::vector<StudyTable> bench_data(int n_studies) {
    Scenario sc = benchmark_scenario(MarginFamily::Normal);
    sc.n_studies = n_studies;
    Rng rng = Rng::substream(42, 0);
    return simulate_replication(sc, rng);
}

static void BM_DependentGrid(benchmark::State& state) {
    auto spec = benchmark_scenario(MarginFamily::Normal).truth.vine();
    auto rule = gauss_legendre(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        DependentGrid g(spec, rule);
        benchmark::DoNotOptimize(g.level_v(5).data());
    }
}
BENCHMARK(BM_DependentGrid)->Arg(15)->Arg(25);

static void BM_LoglikCold(benchmark::State& state) {
    auto data = bench_data(11);
    ModelParams p = benchmark_scenario(MarginFamily::Normal).truth;
    for (auto _ : state) {
        LikelihoodEngine eng(data, {.nq = static_cast<int>(state.range(0))});
        benchmark::DoNotOptimize(eng.loglik(p));
    }
}
BENCHMARK(BM_LoglikCold)->Arg(15)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_LoglikWarmPerturbed(benchmark::State& state) {
    // gradient-style workload: one tau nudged per call against a warm cache
    auto data = bench_data(11);
    ModelParams p = benchmark_scenario(MarginFamily::Normal).truth;
    LikelihoodEngine eng(data, {.nq = static_cast<int>(state.range(0))});
    eng.loglik(p);
    double eps = 1e-5;
    for (auto _ : state) {
        ModelParams q = p;
        q.taus[2] += (eps = -eps);
        benchmark::DoNotOptimize(eng.loglik(q));
    }
}
BENCHMARK(BM_LoglikWarmPerturbed)->Arg(15)->Arg(25)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
