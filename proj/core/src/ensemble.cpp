#include "kaclab/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab {

double ParticleState::total_energy() const {
    double e = 0.0;
    for (const Vec& v : velocities) e += v.norm2();
    return e;
}

Vec ParticleState::total_momentum() const {
    Vec p;
    for (const Vec& v : velocities) p += v;
    return p;
}

void EnsembleSpec::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("EnsembleSpec: mu must be positive");
    if (replicas < 1) throw std::invalid_argument("EnsembleSpec: need at least one replica");
    if (t_final < 0.0) throw std::invalid_argument("EnsembleSpec: t_final must be >= 0");
    if (kernel.dimension() != f0.dimension())
        throw std::invalid_argument("EnsembleSpec: kernel and f0 dimension mismatch");
}

ParticleState sample_initial_state(const EnsembleSpec& spec, std::uint64_t replica) {
    spec.validate();
    if (replica >= spec.replicas)
        throw std::invalid_argument("sample_initial_state: replica index out of range");

    CounterRng rng(spec.seed, replica, stream::initial_state);
    std::uint64_t n = 0;
    if (spec.mode == EnsembleMode::grand_canonical) {
        n = rng.poisson(spec.mu);
    } else {
        n = static_cast<std::uint64_t>(std::llround(spec.mu));
    }

    ParticleState state;
    state.seed_tag = replica;
    state.velocities.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) state.velocities.push_back(spec.f0.sample(rng));
    return state;
}

std::uint64_t falling_factorial(std::uint64_t n, unsigned j) {
    if (j > n) return 0;
    std::uint64_t out = 1;
    for (unsigned k = 0; k < j; ++k) {
        std::uint64_t next;
        if (__builtin_mul_overflow(out, n - k, &next))
            throw std::overflow_error("falling_factorial: count exceeds 64 bits");
        out = next;
    }
    return out;
}

std::uint64_t factorial_tuple_count(const ParticleState& state, unsigned j) {
    return falling_factorial(state.size(), j);
}

} // namespace kaclab
