#include "kaclab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace kaclab {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix of the
// orthogonal-polynomial recurrence, weights mu0 * (first eigenvector row)^2.
QuadratureRule golub_welsch(const std::vector<double>& offdiag, double mu0) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        jacobi(k, k + 1) = offdiag[static_cast<std::size_t>(k)];
        jacobi(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}
} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<double> offdiag;
    offdiag.reserve(static_cast<std::size_t>(n) - 1);
    for (int k = 1; k < n; ++k)
        offdiag.push_back(k / std::sqrt(4.0 * k * k - 1.0));
    return golub_welsch(offdiag, 2.0);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    QuadratureRule rule = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = mid + half * rule.nodes[static_cast<std::size_t>(i)];
        rule.weights[static_cast<std::size_t>(i)] *= half;
    }
    return rule;
}

QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    std::vector<double> offdiag;
    offdiag.reserve(static_cast<std::size_t>(n) - 1);
    for (int k = 1; k < n; ++k) offdiag.push_back(std::sqrt(0.5 * k));
    return golub_welsch(offdiag, std::sqrt(kPi));
}

SphereRule sphere_quadrature(int n_polar, int n_azimuth) {
    if (n_polar < 1 || n_azimuth < 1)
        throw std::invalid_argument("sphere_quadrature: bad node counts");
    const QuadratureRule polar = gauss_legendre(n_polar); // cos(theta) in [-1,1]
    SphereRule rule;
    rule.points.reserve(static_cast<std::size_t>(n_polar) * static_cast<std::size_t>(n_azimuth));
    rule.weights.reserve(rule.points.capacity());
    const double dphi = 2.0 * kPi / n_azimuth;
    for (int i = 0; i < n_polar; ++i) {
        const double z = polar.nodes[static_cast<std::size_t>(i)];
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int k = 0; k < n_azimuth; ++k) {
            const double phi = dphi * (k + 0.5);
            Vec p;
            p[0] = r * std::cos(phi);
            p[1] = r * std::sin(phi);
            p[2] = z;
            rule.points.push_back(p);
            rule.weights.push_back(polar.weights[static_cast<std::size_t>(i)] * dphi);
        }
    }
    return rule;
}

} // namespace kaclab
