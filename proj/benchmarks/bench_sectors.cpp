#include <benchmark/benchmark.h>

#include "kaclab/sector_state.hpp"

using namespace kaclab;

namespace {

// Full grand-canonical master-equation step cost at a given intensity.
void BM_evolve_sectors(benchmark::State& state) {
    const double mu = static_cast<double>(state.range(0));
    const DiscreteModel model = make_random_reversible_model(3, 7, 0.5);
    const std::vector<double> f0{0.6, 0.3, 0.1};
    const unsigned n_max = default_n_max(mu);
    const double t_step = 0.01;
    for (auto _ : state) {
        state.PauseTiming();
        SectorState st = make_initial_sector_state(model, mu, f0, n_max);
        state.ResumeTiming();
        evolve_sectors(st, model, t_step, 1);
        benchmark::DoNotOptimize(st.sectors.back().data());
    }
    state.counters["n_max"] = n_max;
}

} // namespace

BENCHMARK(BM_evolve_sectors)->Arg(5)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);
