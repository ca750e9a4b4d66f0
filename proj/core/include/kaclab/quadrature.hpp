#pragma once

#include <functional>
#include <vector>

#include "kaclab/vec.hpp"

namespace kaclab {

/// Adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);
/// Gauss-Legendre mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Gauss-Hermite rule for integrals against exp(-x^2) (physicists' weight).
QuadratureRule gauss_hermite(int n);

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
/// uniform azimuth grid. Weights sum to 4*pi; exact for low-degree
/// polynomials in the components of omega.
struct SphereRule {
    std::vector<Vec> points;
    std::vector<double> weights;
};
SphereRule sphere_quadrature(int n_polar = 16, int n_azimuth = 32);

} // namespace kaclab
