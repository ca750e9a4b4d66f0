#include <benchmark/benchmark.h>

#include "kaclab/correlation.hpp"
#include "kaclab/rng.hpp"

using namespace kaclab;

namespace {

// Signed subset-sum transform cost on j-fold tables.
void BM_correlation_error(benchmark::State& state) {
    const auto j = static_cast<unsigned>(state.range(0));
    const auto cells = static_cast<std::size_t>(state.range(1));
    CounterRng rng(1, 0);
    std::vector<DensityTable> fstack;
    for (unsigned k = 1; k <= j; ++k) {
        DensityTable t(k, cells);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform();
        fstack.push_back(std::move(t));
    }
    DensityTable fref(1, cells);
    for (std::size_t i = 0; i < cells; ++i) fref[i] = rng.uniform();
    for (auto _ : state) {
        DensityTable e = correlation_error(fstack, fref, j);
        benchmark::DoNotOptimize(e.data().data());
    }
}

} // namespace

BENCHMARK(BM_correlation_error)
    ->Args({3, 64})
    ->Args({4, 16})
    ->Args({5, 8})
    ->Unit(benchmark::kMillisecond);
