#pragma once

#include <cstdint>

namespace kaclab {

/// Counter-based splittable generator in the SplittableRandom family:
/// every output is the splitmix64 finalizer applied to an affine counter,
/// and the per-stream key is itself derived by hashing (seed, replica,
/// stream). Streams keyed by distinct (seed, replica, stream) triples are
/// statistically independent and can be consumed in any order across
/// threads, which is what makes ensemble runs reproducible regardless of
/// the thread budget.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t replica, std::uint64_t stream = 0);

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 bits of mantissa.
    double uniform();

    /// Uniform double in (0, 1]; safe as an argument to log().
    double uniform_pos();

    /// Uniform integer in [0, n), n > 0. Unbiased (rejection on the tail).
    std::uint64_t uniform_below(std::uint64_t n);

    /// Standard normal via Box-Muller (no cached spare, so the stream
    /// position is a pure function of the number of calls).
    double normal();

    /// Exponential with unit mean.
    double exponential();

    /// Poisson with mean mu >= 0, exact in distribution for all mu.
    std::uint64_t poisson(double mu);

private:
    std::uint64_t state_;
    std::uint64_t gamma_;
};

/// splitmix64 finalizer; also used to derive stream keys.
std::uint64_t mix64(std::uint64_t z);

} // namespace kaclab
