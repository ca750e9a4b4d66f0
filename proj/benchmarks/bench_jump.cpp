#include <benchmark/benchmark.h>

#include "kaclab/jump_process.hpp"

using namespace kaclab;

namespace {

// Collision throughput of the uniformization engine at fixed N.
void BM_advance(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const Kernel kernel = Kernel::truncated_hard_sphere(3, 0.02, 4.0);
    EnsembleSpec spec;
    spec.mu = static_cast<double>(n);
    spec.replicas = 1;
    spec.mode = EnsembleMode::canonical;
    spec.kernel = kernel;
    spec.f0 = InitialDensity::gaussian(3, 1.0);
    ParticleState base = sample_initial_state(spec, 0);

    const double horizon = 10.0;
    JumpStats stats;
    std::uint64_t round = 0;
    for (auto _ : state) {
        ParticleState s = base;
        CounterRng rng(1, round++, stream::dynamics);
        advance(s, kernel, spec.mu, horizon, rng, &stats);
        benchmark::DoNotOptimize(s.velocities.data());
    }
    state.counters["candidates/s"] = benchmark::Counter(
        static_cast<double>(stats.candidates), benchmark::Counter::kIsRate);
    state.counters["acceptance"] = stats.acceptance_rate();
}

} // namespace

BENCHMARK(BM_advance)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
