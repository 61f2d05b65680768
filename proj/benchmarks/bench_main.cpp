#include <random>

#include <benchmark/benchmark.h>

#include "netcontract/balancing.hpp"
#include "netcontract/fhn.hpp"
#include "netcontract/stabilization.hpp"

using namespace netcontract;

namespace {

// Dense random irreducible Metzler matrix; the ring keeps it strongly connected.
Matrix random_metzler(int n, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = 6.0 * u(rng) - 3.0;
        a((i + 1) % n, i) = 0.1 + u(rng);
        for (int j = 0; j < n; ++j)
            if (i != j && u(rng) < density) a(i, j) = u(rng);
    }
    return a;
}

void BM_Balance(benchmark::State& state) {
    const MetzlerMatrix a(random_metzler(static_cast<int>(state.range(0)), 0.1, 1));
    for (auto _ : state) benchmark::DoNotOptimize(balance(a));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Balance)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_PerronPair(benchmark::State& state) {
    const MetzlerMatrix a(random_metzler(static_cast<int>(state.range(0)), 0.1, 2));
    for (auto _ : state) benchmark::DoNotOptimize(perron_pair(a));
}
BENCHMARK(BM_PerronPair)->RangeMultiplier(2)->Range(8, 256);

void BM_Stabilize(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const MetzlerMatrix a(random_metzler(n, 0.1, 3));
    const Vector w = Vector::Ones(n);
    for (auto _ : state) benchmark::DoNotOptimize(minimal_effort_stabilize(a, w, -1.0));
}
BENCHMARK(BM_Stabilize)->RangeMultiplier(2)->Range(8, 128);

void BM_FhnSimulate(benchmark::State& state) {
    const auto cfg = fhn::reference_network();
    const Vector x0 = fhn::random_initial_state(cfg.neurons(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(fhn::simulate(cfg, x0, 5.0, cfg.step));
}
BENCHMARK(BM_FhnSimulate)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
