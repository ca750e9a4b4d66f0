#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kaclab/ensemble.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/quadrature.hpp"
#include "test_helpers.hpp"

using namespace kaclab;
using namespace kaclab::testing;

namespace {

EnsembleSpec base_spec(double mu, std::uint64_t replicas, std::uint64_t seed,
                       EnsembleMode mode = EnsembleMode::grand_canonical) {
    EnsembleSpec spec;
    spec.mu = mu;
    spec.replicas = replicas;
    spec.mode = mode;
    spec.seed = seed;
    spec.kernel = Kernel::maxwell(3);
    spec.f0 = InitialDensity::gaussian(3, 1.0);
    return spec;
}

} // namespace

TEST_CASE("vanishing intensity gives empty states") {
    const EnsembleSpec spec = base_spec(1e-12, 64, 5);
    for (std::uint64_t r = 0; r < spec.replicas; ++r)
        CHECK(sample_initial_state(spec, r).size() == 0);
}

TEST_CASE("Poisson particle number: mean and variance at mu = 100") {
    const EnsembleSpec spec = base_spec(100.0, 10000, 21);
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t r = 0; r < spec.replicas; ++r) {
        const auto n = static_cast<double>(sample_initial_state(spec, r).size());
        sum += n;
        sum2 += n * n;
    }
    const double r = static_cast<double>(spec.replicas);
    const double mean = sum / r;
    const double var = sum2 / r - mean * mean;
    CHECK(std::abs(mean - 100.0) <= 4.0 * std::sqrt(100.0 / r));
    CHECK(std::abs(var - 100.0) <= 0.1 * 100.0);
}

TEST_CASE("canonical mode fixes N = round(mu)") {
    const EnsembleSpec spec = base_spec(50.0, 200, 3, EnsembleMode::canonical);
    for (std::uint64_t r = 0; r < spec.replicas; ++r)
        CHECK(sample_initial_state(spec, r).size() == 50);
}

TEST_CASE("factorial_tuple_count basics") {
    ParticleState s;
    s.velocities.resize(5);
    CHECK(factorial_tuple_count(s, 2) == 20);
    CHECK(factorial_tuple_count(s, 0) == 1);
    CHECK(factorial_tuple_count(s, 6) == 0);
    CHECK(falling_factorial(7, 3) == 210);
    ParticleState big;
    big.velocities.resize(1u << 16);
    CHECK_THROWS_AS(factorial_tuple_count(big, 5), std::overflow_error);
}

TEST_CASE("Poisson factorial moments: E[(N)_j] = mu^j") {
    // j = 3, mu = 30 at 1e5 draws, within 4 standard errors of 27000; plus
    // the normalized check for every j <= 4 at mu = 12, which is why the
    // tuple estimator needs no 1/mu correction at t = 0.
    {
        const EnsembleSpec spec = base_spec(30.0, 100000, 8);
        std::vector<double> counts;
        counts.reserve(spec.replicas);
        CounterRng rng(spec.seed, 0, stream::initial_state);
        for (std::uint64_t r = 0; r < spec.replicas; ++r) {
            CounterRng each(spec.seed, r, stream::initial_state);
            counts.push_back(static_cast<double>(falling_factorial(each.poisson(30.0), 3)));
        }
        const MeanStderr ms = mean_stderr(counts);
        CHECK(std::abs(ms.mean - 27000.0) <= 4.0 * ms.stderr_value);
    }
    {
        const double mu = 12.0;
        const std::uint64_t reps = 200000;
        for (unsigned j = 1; j <= 4; ++j) {
            std::vector<double> ratio;
            ratio.reserve(reps);
            for (std::uint64_t r = 0; r < reps; ++r) {
                CounterRng each(99, r, stream::initial_state);
                ratio.push_back(static_cast<double>(falling_factorial(each.poisson(mu), j)) /
                                std::pow(mu, j));
            }
            const MeanStderr ms = mean_stderr(ratio);
            CHECK(std::abs(ms.mean - 1.0) <= 4.0 * ms.stderr_value);
        }
    }
}

TEST_CASE("reproducibility: states are a pure function of (seed, replica)") {
    const EnsembleSpec spec = base_spec(40.0, 64, 1234);
    std::vector<ParticleState> serial(spec.replicas);
    for (std::uint64_t r = 0; r < spec.replicas; ++r) serial[r] = sample_initial_state(spec, r);

    std::vector<ParticleState> threaded(spec.replicas);
    parallel_for(spec.replicas, 4, [&](std::size_t r) {
        threaded[r] = sample_initial_state(spec, r);
    });

    for (std::uint64_t r = 0; r < spec.replicas; ++r) {
        REQUIRE(serial[r].size() == threaded[r].size());
        for (std::size_t i = 0; i < serial[r].size(); ++i)
            for (int c = 0; c < 3; ++c)
                CHECK(serial[r].velocities[i][c] == threaded[r].velocities[i][c]);
    }
    // And distinct replicas differ.
    CHECK(serial[0].size() != serial[1].size() + serial[0].size());
}

TEST_CASE("initial densities normalize and report correct moments") {
    SUBCASE("pdf integrates to one (d=1 kinds)") {
        for (const InitialDensity& f :
             {InitialDensity::gaussian(1, 1.0), InitialDensity::mixture(1, 0.5, 0.5, 1.3)}) {
            const double mass = adaptive_simpson(
                [&](double x) {
                    Vec v;
                    v[0] = x;
                    return f.pdf(v);
                },
                -20.0, 20.0, 1e-11);
            CHECK(std::abs(mass - 1.0) <= 1e-8);
        }
    }
    SUBCASE("d=3 gaussian pdf integrates to one (radial quadrature)") {
        const InitialDensity f = InitialDensity::gaussian(3, 0.8);
        const double mass = adaptive_simpson(
            [&](double r) {
                Vec v;
                v[0] = r;
                return 4.0 * kPi * r * r * f.pdf(v);
            },
            0.0, 20.0, 1e-11);
        CHECK(std::abs(mass - 1.0) <= 1e-8);
    }
    SUBCASE("sampler moments match accessors at 1e6 samples") {
        for (const InitialDensity& f :
             {InitialDensity::gaussian(3, 1.0), InitialDensity::mixture(3, 0.5, 0.5, 1.323),
              InitialDensity::discrete({-1.0, 0.0, 1.0}, {0.6, 0.3, 0.1})}) {
            CounterRng rng(31, 0);
            std::vector<double> m2s, m4s;
            const int n = 1000000;
            m2s.reserve(n);
            m4s.reserve(n);
            for (int i = 0; i < n; ++i) {
                const Vec v = f.sample(rng);
                m2s.push_back(v.norm2());
                m4s.push_back(v.norm2() * v.norm2());
            }
            const MeanStderr m2 = mean_stderr(m2s);
            const MeanStderr m4 = mean_stderr(m4s);
            CHECK(std::abs(m2.mean - f.second_moment()) <= 4.0 * m2.stderr_value);
            CHECK(std::abs(m4.mean - f.fourth_moment()) <= 4.0 * m4.stderr_value);
        }
    }
    SUBCASE("invalid construction") {
        CHECK_THROWS_AS(InitialDensity::gaussian(1, -1.0), std::invalid_argument);
        CHECK_THROWS_AS(InitialDensity::discrete({1.0, 2.0}, {0.5, 0.6}),
                        std::invalid_argument);
        CHECK_THROWS_AS(InitialDensity::discrete({1.0, 2.0}, {1.2, -0.2}),
                        std::invalid_argument);
    }
}

TEST_CASE("spec validation") {
    EnsembleSpec spec = base_spec(10.0, 4, 0);
    spec.mu = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = base_spec(10.0, 4, 0);
    spec.f0 = InitialDensity::gaussian(1, 1.0); // dimension mismatch with d=3 kernel
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = base_spec(10.0, 4, 0);
    CHECK_THROWS_AS(sample_initial_state(spec, 4), std::invalid_argument);
}
