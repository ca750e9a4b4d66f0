#include "kaclab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replica, std::uint64_t stream) {
    // Key derivation: fold the triple through the finalizer twice so that
    // nearby (replica, stream) pairs land in unrelated counter orbits.
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (replica + 0xD1B54A32D192ED03ull));
    k = mix64(k ^ (stream + 0x8CB92BA72F3D8DD7ull));
    state_ = k;
    // Odd increment, also keyed.
    gamma_ = mix64(k + kGolden) | 1ull;
}

std::uint64_t CounterRng::next_u64() {
    state_ += gamma_;
    return mix64(state_);
}

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t CounterRng::uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double CounterRng::normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double CounterRng::exponential() {
    return -std::log(uniform_pos());
}

std::uint64_t CounterRng::poisson(double mu) {
    if (mu < 0.0 || !std::isfinite(mu)) throw std::invalid_argument("poisson: bad mean");
    // Split large means: Poisson(a+b) = Poisson(a) + Poisson(b). Keeps the
    // product method inside exp() range; remains exact in distribution.
    std::uint64_t total = 0;
    while (mu > 500.0) {
        const double half = mu * 0.5;
        total += poisson(half);
        mu -= half;
    }
    const double threshold = std::exp(-mu);
    std::uint64_t k = 0;
    double prod = 1.0;
    for (;;) {
        prod *= uniform_pos();
        if (prod <= threshold) break;
        ++k;
    }
    return total + k;
}

} // namespace kaclab
