#pragma once

#include <vector>

#include "kaclab/rng.hpp"
#include "kaclab/vec.hpp"

namespace kaclab {

/// One-particle initial density f0. Three kinds:
///   gaussian      centered isotropic Gaussian, per-axis sigma
///   mixture       equal-or-weighted mix of two centered isotropic Gaussians
///   discrete      pmf on a finite velocity set (1D values)
/// All kinds expose a pdf/pmf, a sampler, and analytic moment accessors.
class InitialDensity {
public:
    enum class Kind { gaussian, mixture, discrete };

    static InitialDensity gaussian(int dimension, double sigma);
    static InitialDensity mixture(int dimension, double w1, double sigma1, double sigma2);
    static InitialDensity discrete(std::vector<double> values, std::vector<double> pmf);

    Kind kind() const { return kind_; }
    int dimension() const { return dimension_; }

    /// Density (continuous kinds) at v. For the discrete kind this is the
    /// pmf of the nearest atom and only meaningful on the atom set.
    double pdf(const Vec& v) const;

    Vec sample(CounterRng& rng) const;

    /// E[v] (componentwise; zero for the built-in centered kinds).
    Vec mean() const;
    /// E[|v|^2].
    double second_moment() const;
    /// E[|v|^4].
    double fourth_moment() const;

    // Discrete-kind accessors.
    const std::vector<double>& atom_values() const { return values_; }
    const std::vector<double>& atom_pmf() const { return pmf_; }

    /// Gaussian component decomposition (continuous kinds only).
    struct Component {
        double weight;
        double sigma;
    };
    std::vector<Component> components() const;

private:
    InitialDensity() = default;

    Kind kind_ = Kind::gaussian;
    int dimension_ = 3;
    double sigma1_ = 1.0;
    double sigma2_ = 1.0;
    double w1_ = 1.0;
    std::vector<double> values_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

} // namespace kaclab
