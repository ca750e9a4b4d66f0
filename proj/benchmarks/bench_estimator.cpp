#include <benchmark/benchmark.h>

#include "kaclab/estimator.hpp"

using namespace kaclab;

namespace {

// Histogram-reduction tuple accumulation at order j.
void BM_estimate_fj(benchmark::State& state) {
    const auto j = static_cast<unsigned>(state.range(0));
    const double mu = static_cast<double>(state.range(1));
    EnsembleSpec spec;
    spec.mu = mu;
    spec.replicas = 256;
    spec.seed = 5;
    spec.kernel = Kernel::maxwell(1);
    spec.f0 = InitialDensity::gaussian(1, 1.0);
    EstimatorRequest req;
    req.checkpoints = {0.0};
    req.orders = {j};
    req.grid = GridSpec::uniform(1, 64, 6.0);
    req.groups = 16;
    req.threads = 1;
    for (auto _ : state) {
        EnsembleEstimate est = estimate_ensemble(spec, req);
        benchmark::DoNotOptimize(est.estimates.front().table.data().data());
    }
    state.counters["replicas/s"] =
        benchmark::Counter(static_cast<double>(spec.replicas), benchmark::Counter::kIsRate);
}

} // namespace

BENCHMARK(BM_estimate_fj)
    ->Args({1, 100})
    ->Args({2, 100})
    ->Args({3, 100})
    ->Args({2, 1000})
    ->Unit(benchmark::kMillisecond);
