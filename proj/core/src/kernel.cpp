#include "kaclab/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace kaclab {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFourPi = 4.0 * kPi;

void check_dimension(int d) {
    if (d != 1 && d != 3) throw std::invalid_argument("Kernel: dimension must be 1 or 3");
}
} // namespace

Kernel Kernel::maxwell(int dimension, double b0) {
    check_dimension(dimension);
    Kernel k;
    k.kind_ = Kind::maxwell;
    k.dimension_ = dimension;
    const double measure = (dimension == 3) ? kFourPi : kTwoPi;
    k.b0_ = (b0 > 0.0) ? b0 : 1.0 / measure;
    k.b_max_ = k.b0_;
    k.lambda_cap_ = k.b0_ * measure;
    k.label_ = "maxwell";
    return k;
}

Kernel Kernel::truncated_hard_sphere(int dimension, double b0, double v_cap) {
    check_dimension(dimension);
    if (b0 <= 0.0 || v_cap <= 0.0)
        throw std::invalid_argument("Kernel: b0 and v_cap must be positive");
    Kernel k;
    k.kind_ = Kind::truncated_hard_sphere;
    k.dimension_ = dimension;
    k.b0_ = b0;
    k.v_cap_ = v_cap;
    k.b_max_ = b0 * v_cap;
    k.lambda_cap_ = k.b_max_ * ((dimension == 3) ? kFourPi : kTwoPi);
    k.label_ = "truncated_hard_sphere";
    return k;
}

Kernel Kernel::custom(int dimension, double b_max,
                      std::function<double(const Vec&, const Vec&)> density,
                      std::function<double(const Vec&)> total_rate,
                      std::string label) {
    check_dimension(dimension);
    if (b_max <= 0.0) throw std::invalid_argument("Kernel: b_max must be positive");
    if (!density || !total_rate)
        throw std::invalid_argument("Kernel: custom kernel needs density and total_rate");
    Kernel k;
    k.kind_ = Kind::custom;
    k.dimension_ = dimension;
    k.b_max_ = b_max;
    k.lambda_cap_ = b_max * ((dimension == 3) ? kFourPi : kTwoPi);
    k.density_fn_ = std::move(density);
    k.rate_fn_ = std::move(total_rate);
    k.label_ = std::move(label);
    return k;
}

double Kernel::angular_measure() const {
    return (dimension_ == 3) ? kFourPi : kTwoPi;
}

double Kernel::density(const Vec& omega, const Vec& v, const Vec& w) const {
    switch (kind_) {
        case Kind::maxwell:
            return b0_;
        case Kind::truncated_hard_sphere: {
            const Vec u = v - w;
            return b0_ * std::min(u.norm(), v_cap_);
        }
        case Kind::custom:
            return density_fn_(omega, v - w);
    }
    return 0.0;
}

double Kernel::pair_intensity(const Vec& v, const Vec& w) const {
    switch (kind_) {
        case Kind::maxwell:
            return b0_ * angular_measure();
        case Kind::truncated_hard_sphere: {
            const Vec u = v - w;
            return b0_ * std::min(u.norm(), v_cap_) * angular_measure();
        }
        case Kind::custom:
            return rate_fn_(v - w);
    }
    return 0.0;
}

Vec Kernel::sample_uniform_param(CounterRng& rng) const {
    Vec omega;
    if (dimension_ == 3) {
        // Uniform on S^2: z uniform in [-1,1], azimuth uniform.
        const double z = 2.0 * rng.uniform() - 1.0;
        const double phi = kTwoPi * rng.uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        omega[0] = r * std::cos(phi);
        omega[1] = r * std::sin(phi);
        omega[2] = z;
    } else {
        omega[0] = kTwoPi * rng.uniform();
    }
    return omega;
}

Vec Kernel::sample_scatter_param(const Vec& v, const Vec& w, CounterRng& rng) const {
    if (pair_intensity(v, w) <= 0.0)
        throw std::domain_error("sample_scatter_param: zero pair intensity, no event to sample");
    if (kind_ == Kind::maxwell) return sample_uniform_param(rng);
    for (;;) {
        const Vec omega = sample_uniform_param(rng);
        if (rng.uniform() * b_max_ <= density(omega, v, w)) return omega;
    }
}

void scatter(Vec& v, Vec& w, const Vec& omega, int dimension) {
    check_dimension(dimension);
    if (dimension == 3) {
        const double n2 = omega.norm2();
        if (std::abs(n2 - 1.0) > 1e-9)
            throw std::invalid_argument("scatter: omega must be a unit vector for d=3");
        const double h = dot(omega, v - w);
        v -= h * omega;
        w += h * omega;
    } else {
        const double ct = std::cos(omega[0]);
        const double st = std::sin(omega[0]);
        const double a = v[0], b = w[0];
        v[0] = a * ct + b * st;
        w[0] = -a * st + b * ct;
    }
}

} // namespace kaclab
