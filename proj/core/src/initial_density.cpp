#include "kaclab/initial_density.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kaclab {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

double gaussian_pdf(const Vec& v, int d, double sigma) {
    const double s2 = sigma * sigma;
    double q = 0.0;
    for (int i = 0; i < d; ++i) q += v[i] * v[i];
    return std::exp(-0.5 * q / s2) / std::pow(2.0 * kPi * s2, 0.5 * d);
}
} // namespace

InitialDensity InitialDensity::gaussian(int dimension, double sigma) {
    if (dimension != 1 && dimension != 3)
        throw std::invalid_argument("InitialDensity: dimension must be 1 or 3");
    if (sigma <= 0.0) throw std::invalid_argument("InitialDensity: sigma must be positive");
    InitialDensity f;
    f.kind_ = Kind::gaussian;
    f.dimension_ = dimension;
    f.sigma1_ = sigma;
    return f;
}

InitialDensity InitialDensity::mixture(int dimension, double w1, double sigma1, double sigma2) {
    if (dimension != 1 && dimension != 3)
        throw std::invalid_argument("InitialDensity: dimension must be 1 or 3");
    if (w1 < 0.0 || w1 > 1.0) throw std::invalid_argument("InitialDensity: weight outside [0,1]");
    if (sigma1 <= 0.0 || sigma2 <= 0.0)
        throw std::invalid_argument("InitialDensity: sigmas must be positive");
    InitialDensity f;
    f.kind_ = Kind::mixture;
    f.dimension_ = dimension;
    f.w1_ = w1;
    f.sigma1_ = sigma1;
    f.sigma2_ = sigma2;
    return f;
}

InitialDensity InitialDensity::discrete(std::vector<double> values, std::vector<double> pmf) {
    if (values.empty() || values.size() != pmf.size())
        throw std::invalid_argument("InitialDensity: values/pmf size mismatch");
    double total = 0.0;
    for (double p : pmf) {
        if (p < 0.0) throw std::invalid_argument("InitialDensity: negative pmf entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("InitialDensity: pmf must sum to 1");
    InitialDensity f;
    f.kind_ = Kind::discrete;
    f.dimension_ = 1;
    f.values_ = std::move(values);
    f.pmf_ = std::move(pmf);
    f.cdf_.resize(f.pmf_.size());
    std::partial_sum(f.pmf_.begin(), f.pmf_.end(), f.cdf_.begin());
    f.cdf_.back() = 1.0;
    return f;
}

double InitialDensity::pdf(const Vec& v) const {
    switch (kind_) {
        case Kind::gaussian:
            return gaussian_pdf(v, dimension_, sigma1_);
        case Kind::mixture:
            return w1_ * gaussian_pdf(v, dimension_, sigma1_) +
                   (1.0 - w1_) * gaussian_pdf(v, dimension_, sigma2_);
        case Kind::discrete: {
            std::size_t best = 0;
            double dist = std::abs(v[0] - values_[0]);
            for (std::size_t a = 1; a < values_.size(); ++a) {
                const double d = std::abs(v[0] - values_[a]);
                if (d < dist) { dist = d; best = a; }
            }
            return pmf_[best];
        }
    }
    return 0.0;
}

Vec InitialDensity::sample(CounterRng& rng) const {
    Vec v;
    switch (kind_) {
        case Kind::gaussian:
            for (int i = 0; i < dimension_; ++i) v[i] = sigma1_ * rng.normal();
            return v;
        case Kind::mixture: {
            const double s = (rng.uniform() < w1_) ? sigma1_ : sigma2_;
            for (int i = 0; i < dimension_; ++i) v[i] = s * rng.normal();
            return v;
        }
        case Kind::discrete: {
            const double u = rng.uniform();
            std::size_t a = 0;
            while (a + 1 < cdf_.size() && u >= cdf_[a]) ++a;
            v[0] = values_[a];
            return v;
        }
    }
    return v;
}

Vec InitialDensity::mean() const {
    Vec m;
    if (kind_ == Kind::discrete) {
        for (std::size_t a = 0; a < values_.size(); ++a) m[0] += values_[a] * pmf_[a];
    }
    return m;
}

double InitialDensity::second_moment() const {
    const double d = dimension_;
    switch (kind_) {
        case Kind::gaussian:
            return d * sigma1_ * sigma1_;
        case Kind::mixture:
            return d * (w1_ * sigma1_ * sigma1_ + (1.0 - w1_) * sigma2_ * sigma2_);
        case Kind::discrete: {
            double m2 = 0.0;
            for (std::size_t a = 0; a < values_.size(); ++a)
                m2 += values_[a] * values_[a] * pmf_[a];
            return m2;
        }
    }
    return 0.0;
}

std::vector<InitialDensity::Component> InitialDensity::components() const {
    switch (kind_) {
        case Kind::gaussian:
            return {{1.0, sigma1_}};
        case Kind::mixture:
            return {{w1_, sigma1_}, {1.0 - w1_, sigma2_}};
        case Kind::discrete:
            throw std::invalid_argument("InitialDensity: discrete kind has no Gaussian components");
    }
    return {};
}

double InitialDensity::fourth_moment() const {
    const double d = dimension_;
    const double c = d * (d + 2.0);
    switch (kind_) {
        case Kind::gaussian:
            return c * std::pow(sigma1_, 4);
        case Kind::mixture:
            return c * (w1_ * std::pow(sigma1_, 4) + (1.0 - w1_) * std::pow(sigma2_, 4));
        case Kind::discrete: {
            double m4 = 0.0;
            for (std::size_t a = 0; a < values_.size(); ++a)
                m4 += std::pow(values_[a], 4) * pmf_[a];
            return m4;
        }
    }
    return 0.0;
}

} // namespace kaclab
