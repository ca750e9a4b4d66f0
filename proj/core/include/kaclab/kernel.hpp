#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "kaclab/rng.hpp"
#include "kaclab/vec.hpp"

namespace kaclab {

/// Bounded collision rate density B(omega; v - w) together with the
/// majorant constants the exact jump simulator needs. Immutable after
/// construction and freely shareable across threads.
///
/// Angular domain: the unit sphere S^2 for d=3 (measure 4*pi); a rotation
/// angle theta in [0, 2*pi) for d=1, encoded in omega[0].
class Kernel {
public:
    enum class Kind { maxwell, truncated_hard_sphere, custom };

    /// Constant-rate kernel B == b0. Default b0 normalizes the total pair
    /// rate lambda to 1 (b0 = 1/measure), fixing the time unit to one
    /// collision per pair per mu.
    static Kernel maxwell(int dimension, double b0 = -1.0);

    /// B = b0 * min(|v - w|, v_cap); the cap enforces boundedness.
    static Kernel truncated_hard_sphere(int dimension, double b0, double v_cap);

    /// Arbitrary bounded density. `density(omega, u)` evaluates B(omega; u),
    /// `total_rate(u)` its integral over the angular domain; `b_max` must
    /// dominate the density everywhere.
    static Kernel custom(int dimension, double b_max,
                         std::function<double(const Vec&, const Vec&)> density,
                         std::function<double(const Vec&)> total_rate,
                         std::string label = "custom");

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    double b0() const { return b0_; }
    double v_cap() const { return v_cap_; }
    /// Pointwise bound: B <= b_max everywhere.
    double b_max() const { return b_max_; }
    /// Pair intensity cap: integral of B over the angular domain is <= this
    /// for every (v, w). Used as the uniformization majorant.
    double pair_intensity_cap() const { return lambda_cap_; }
    /// Total measure of the angular domain (4*pi or 2*pi).
    double angular_measure() const;
    const std::string& label() const { return label_; }

    /// B(omega; v - w).
    double density(const Vec& omega, const Vec& v, const Vec& w) const;

    /// lambda(v, w) = integral of B(.; v - w) over the angular domain.
    double pair_intensity(const Vec& v, const Vec& w) const;

    /// Uniform point on the angular domain (proposal distribution of the
    /// rejection sampler and of the null-collision engine).
    Vec sample_uniform_param(CounterRng& rng) const;

    /// Sample omega with density B(.; v - w) / lambda(v, w) by rejection
    /// against the uniform proposal. Requires lambda(v, w) > 0.
    Vec sample_scatter_param(const Vec& v, const Vec& w, CounterRng& rng) const;

private:
    Kernel() = default;

    Kind kind_ = Kind::maxwell;
    int dimension_ = 3;
    double b0_ = 0.0;
    double v_cap_ = 0.0;
    double b_max_ = 0.0;
    double lambda_cap_ = 0.0;
    std::string label_;
    std::function<double(const Vec&, const Vec&)> density_fn_;
    std::function<double(const Vec&)> rate_fn_;
};

/// One accepted collision: particle indices i < j, scattering parameter,
/// event time.
struct ScatterEvent {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    Vec omega;
    double t = 0.0;
};

/// Two-body scattering map.
///   d=3: reflection v' = v - omega (omega . (v-w)), w' = w + omega (omega . (v-w));
///        conserves momentum and energy, and is an involution in omega.
///   d=1: rotation (v, w) -> (v cos t + w sin t, -v sin t + w cos t) with
///        t = omega[0]; conserves energy only.
/// Throws std::invalid_argument when d=3 and omega is not a unit vector.
void scatter(Vec& v, Vec& w, const Vec& omega, int dimension);

} // namespace kaclab
