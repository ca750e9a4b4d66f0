#pragma once

#include <array>
#include <cmath>

namespace kaclab {

/// Velocity in 1 or 3 dimensions. The active dimension is carried by the
/// kernel / ensemble configuration; for d=1 only c[0] is used and the
/// remaining components stay zero.
struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        c[0] += o.c[0]; c[1] += o.c[1]; c[2] += o.c[2];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        c[0] -= o.c[0]; c[1] -= o.c[1]; c[2] -= o.c[2];
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) {
        a.c[0] *= s; a.c[1] *= s; a.c[2] *= s;
        return a;
    }
    friend double dot(const Vec& a, const Vec& b) {
        return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
    }
    double norm2() const { return dot(*this, *this); }
    double norm() const { return std::sqrt(norm2()); }
};

} // namespace kaclab
