#pragma once

#include <cstdint>
#include <vector>

#include "kaclab/initial_density.hpp"
#include "kaclab/kernel.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/vec.hpp"

namespace kaclab {

/// One grand-canonical configuration: the realized particle number is the
/// length of `velocities`.
struct ParticleState {
    std::vector<Vec> velocities;
    double t = 0.0;
    std::uint64_t seed_tag = 0;

    std::size_t size() const { return velocities.size(); }
    double total_energy() const;
    Vec total_momentum() const;
};

enum class EnsembleMode { grand_canonical, canonical };

/// Everything needed to reproduce an ensemble run.
struct EnsembleSpec {
    double mu = 1.0;             ///< mean particle number
    std::uint64_t replicas = 1;  ///< R
    EnsembleMode mode = EnsembleMode::grand_canonical;
    std::uint64_t seed = 0;
    double t_final = 0.0;
    Kernel kernel = Kernel::maxwell(3);
    InitialDensity f0 = InitialDensity::gaussian(3, 1.0);

    void validate() const;
};

/// Draw the factorized initial state of one replica: N ~ Poisson(mu) in
/// grand-canonical mode (N = round(mu) in canonical mode), then N i.i.d.
/// velocities from f0. Pure function of (spec, replica).
ParticleState sample_initial_state(const EnsembleSpec& spec, std::uint64_t replica);

/// Number of ordered j-tuples of distinct particles, N!/(N-j)!.
/// Returns 0 when j > N, 1 when j == 0. Throws on uint64 overflow.
std::uint64_t factorial_tuple_count(const ParticleState& state, unsigned j);
std::uint64_t falling_factorial(std::uint64_t n, unsigned j);

// RNG stream ids, one per consumer, so adding a stream never perturbs the
// draws of another.
namespace stream {
inline constexpr std::uint64_t initial_state = 0;
inline constexpr std::uint64_t dynamics = 1;
} // namespace stream

} // namespace kaclab
