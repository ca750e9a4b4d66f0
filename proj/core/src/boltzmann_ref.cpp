#include "kaclab/boltzmann_ref.hpp"

#include <cmath>
#include <stdexcept>

#include "kaclab/fit.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"

namespace kaclab {

std::vector<double> discrete_collision_rhs(const DiscreteModel& model,
                                           const std::vector<double>& f) {
    const int m = model.m;
    if (f.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("discrete_collision_rhs: f size != m");
    std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
    for (int a = 0; a < m; ++a) {
        double acc = 0.0;
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d)
                    acc += model.K(c, d, a, b) * f[static_cast<std::size_t>(c)] *
                               f[static_cast<std::size_t>(d)] -
                           model.K(a, b, c, d) * f[static_cast<std::size_t>(a)] *
                               f[static_cast<std::size_t>(b)];
        rhs[static_cast<std::size_t>(a)] = acc;
    }
    return rhs;
}

std::vector<std::vector<double>> solve_discrete_boltzmann(const DiscreteModel& model,
                                                          const std::vector<double>& f0,
                                                          const std::vector<double>& checkpoints,
                                                          double h_max) {
    for (double p : f0)
        if (p < 0.0) throw std::invalid_argument("solve_discrete_boltzmann: negative pmf entry");
    for (std::size_t k = 1; k < checkpoints.size(); ++k)
        if (checkpoints[k] < checkpoints[k - 1])
            throw std::invalid_argument("solve_discrete_boltzmann: checkpoints must be sorted");
    if (!checkpoints.empty() && checkpoints.front() < 0.0)
        throw std::invalid_argument("solve_discrete_boltzmann: negative time");

    std::vector<std::vector<double>> out;
    out.reserve(checkpoints.size());
    std::vector<double> f = f0;
    const std::size_t m = f.size();
    std::vector<double> k1, k2, k3, k4, tmp(m);
    double t = 0.0;
    for (double target : checkpoints) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<std::size_t>(std::ceil(span / h_max));
            const double h = span / static_cast<double>(steps);
            for (std::size_t step = 0; step < steps; ++step) {
                k1 = discrete_collision_rhs(model, f);
                for (std::size_t i = 0; i < m; ++i) tmp[i] = f[i] + 0.5 * h * k1[i];
                k2 = discrete_collision_rhs(model, tmp);
                for (std::size_t i = 0; i < m; ++i) tmp[i] = f[i] + 0.5 * h * k2[i];
                k3 = discrete_collision_rhs(model, tmp);
                for (std::size_t i = 0; i < m; ++i) tmp[i] = f[i] + h * k3[i];
                k4 = discrete_collision_rhs(model, tmp);
                for (std::size_t i = 0; i < m; ++i)
                    f[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t = target;
        }
        out.push_back(f);
    }
    return out;
}

std::vector<double> solve_discrete_boltzmann_at(const DiscreteModel& model,
                                                const std::vector<double>& f0, double t,
                                                double h_max) {
    return solve_discrete_boltzmann(model, f0, {t}, h_max).front();
}

namespace {

// One canonical sub-trajectory of `count` particles at intensity `count`;
// returns the final state.
template <typename SampleFn>
ParticleState run_sub_trajectory(const PairCollider& collider, const SampleFn& sample_one,
                                 std::uint64_t count, double t, std::uint64_t seed,
                                 std::uint64_t sub) {
    ParticleState state;
    state.seed_tag = sub;
    CounterRng init(seed, sub, stream::initial_state);
    state.velocities.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) state.velocities.push_back(sample_one(init));
    CounterRng dyn(seed, sub, stream::dynamics);
    advance(state, collider, static_cast<double>(count), t, dyn);
    return state;
}

DensityTable pooled_histogram(const std::vector<DensityTable>& subs) {
    DensityTable mean(1, subs.front().cells_per_slot());
    for (const DensityTable& s : subs)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s[i];
    const double n = static_cast<double>(subs.size());
    for (double& x : mean.data()) x /= n;
    mean.truncation_mass = 0.0;
    for (const DensityTable& s : subs) mean.truncation_mass += s.truncation_mass / n;
    mean.stderr_values.assign(mean.size(), 0.0);
    if (subs.size() > 1) {
        for (std::size_t i = 0; i < mean.size(); ++i) {
            double var = 0.0;
            for (const DensityTable& s : subs) {
                const double d = s[i] - mean[i];
                var += d * d;
            }
            var /= n * (n - 1.0);
            mean.stderr_values[i] = std::sqrt(var);
        }
    }
    return mean;
}

template <typename SampleFn>
DensityTable dsmc_reference(const PairCollider& collider, const SampleFn& sample_one,
                            std::uint64_t total_particles, double t, const GridSpec& grid,
                            std::uint64_t seed, unsigned n_sub, unsigned threads) {
    if (total_particles < 10000)
        throw std::invalid_argument("reference_dsmc: need at least 1e4 particles");
    if (n_sub < 2) n_sub = 2;
    const std::uint64_t per_sub = total_particles / n_sub;
    std::vector<DensityTable> subs(n_sub, DensityTable(1, grid.cell_count()));
    parallel_for(n_sub, threads, [&](std::size_t sub) {
        const ParticleState state =
            run_sub_trajectory(collider, sample_one, per_sub, t, seed, sub);
        DensityTable& hist = subs[sub];
        const double w = 1.0 / static_cast<double>(state.size());
        double outside = 0.0;
        for (const Vec& v : state.velocities) {
            const std::int64_t c = grid.cell_of(v);
            if (c < 0) outside += w;
            else hist[static_cast<std::size_t>(c)] += w;
        }
        hist.truncation_mass = outside;
    });
    return pooled_histogram(subs);
}

} // namespace

DensityTable reference_dsmc(const Kernel& kernel, const InitialDensity& f0,
                            std::uint64_t total_particles, double t, const GridSpec& grid,
                            std::uint64_t seed, unsigned n_sub, unsigned threads) {
    const KernelCollider collider(kernel);
    return dsmc_reference(
        collider, [&](CounterRng& rng) { return f0.sample(rng); }, total_particles, t, grid,
        seed, n_sub, threads);
}

DensityTable reference_dsmc_discrete(const DiscreteModel& model, const std::vector<double>& f0,
                                     std::uint64_t total_particles, double t,
                                     std::uint64_t seed, unsigned n_sub, unsigned threads) {
    const DiscreteCollider collider(model);
    const InitialDensity atoms = InitialDensity::discrete(model.values, f0);
    const GridSpec grid = GridSpec::labels(model.values);
    return dsmc_reference(
        collider, [&](CounterRng& rng) { return atoms.sample(rng); }, total_particles, t, grid,
        seed, n_sub, threads);
}

MomentTrajectory dsmc_moment_trajectory(const Kernel& kernel, const InitialDensity& f0,
                                        std::uint64_t total_particles,
                                        const std::vector<double>& checkpoints, int power,
                                        std::uint64_t seed, unsigned n_sub, unsigned threads) {
    if (n_sub < 2) n_sub = 2;
    const std::uint64_t per_sub = total_particles / n_sub;
    const KernelCollider collider(kernel);
    std::vector<std::vector<double>> sub_moments(n_sub);
    parallel_for(n_sub, threads, [&](std::size_t sub) {
        ParticleState state;
        state.seed_tag = sub;
        CounterRng init(seed, sub, stream::initial_state);
        state.velocities.reserve(per_sub);
        for (std::uint64_t i = 0; i < per_sub; ++i) state.velocities.push_back(f0.sample(init));
        CounterRng dyn(seed, sub, stream::dynamics);
        for (double t : checkpoints) {
            advance(state, collider, static_cast<double>(per_sub), t, dyn);
            double acc = 0.0;
            for (const Vec& v : state.velocities)
                acc += std::pow(v.norm2(), 0.5 * power);
            sub_moments[sub].push_back(acc / static_cast<double>(state.size()));
        }
    });

    MomentTrajectory out;
    out.times = checkpoints;
    const double n = static_cast<double>(n_sub);
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        double mean = 0.0;
        for (unsigned sub = 0; sub < n_sub; ++sub) mean += sub_moments[sub][k];
        mean /= n;
        double var = 0.0;
        for (unsigned sub = 0; sub < n_sub; ++sub) {
            const double d = sub_moments[sub][k] - mean;
            var += d * d;
        }
        var /= n * (n - 1.0);
        out.value.push_back(mean);
        out.stderr_value.push_back(std::sqrt(var));
    }
    return out;
}

double m4_derivative_quadrature(const Kernel& kernel, const InitialDensity& f) {
    if (kernel.kind() != Kernel::Kind::maxwell)
        throw std::invalid_argument("m4_derivative_quadrature: constant kernels only");
    const int d = kernel.dimension();
    const double b0 = kernel.b0();

    // Angular average of |v'|^4 + |w'|^4 - |v|^4 - |w|^4 at fixed (v, w).
    const SphereRule sphere = (d == 3) ? sphere_quadrature(12, 24) : SphereRule{};
    const QuadratureRule angle = (d == 1) ? gauss_legendre(24, 0.0, 2.0 * 3.14159265358979323846)
                                          : QuadratureRule{};
    auto kappa4 = [&](const Vec& v, const Vec& w) {
        const double before = v.norm2() * v.norm2() + w.norm2() * w.norm2();
        double acc = 0.0;
        if (d == 3) {
            for (std::size_t q = 0; q < sphere.points.size(); ++q) {
                Vec vp = v, wp = w;
                scatter(vp, wp, sphere.points[q], 3);
                acc += sphere.weights[q] *
                       (vp.norm2() * vp.norm2() + wp.norm2() * wp.norm2() - before);
            }
        } else {
            for (std::size_t q = 0; q < angle.nodes.size(); ++q) {
                Vec omega;
                omega[0] = angle.nodes[q];
                Vec vp = v, wp = w;
                scatter(vp, wp, omega, 1);
                acc += angle.weights[q] *
                       (vp.norm2() * vp.norm2() + wp.norm2() * wp.norm2() - before);
            }
        }
        return b0 * acc;
    };

    // Expectation over f (x) f: per Gaussian-component pair, tensor
    // Gauss-Hermite over the 2d axes. The integrand is a degree-4
    // polynomial in (v, w), so the rule is exact up to roundoff.
    const std::vector<InitialDensity::Component> comps = f.components();
    const QuadratureRule gh = gauss_hermite(8);
    const double norm = std::pow(3.14159265358979323846, -static_cast<double>(d));
    const std::size_t n_nodes = gh.nodes.size();
    double total = 0.0;
    for (const auto& cv : comps)
        for (const auto& cw : comps) {
            double pair_total = 0.0;
            std::vector<std::size_t> idx(static_cast<std::size_t>(2 * d), 0);
            for (;;) {
                Vec v, w;
                double wgt = 1.0;
                for (int axis = 0; axis < d; ++axis) {
                    v[axis] = std::sqrt(2.0) * cv.sigma * gh.nodes[idx[static_cast<std::size_t>(axis)]];
                    wgt *= gh.weights[idx[static_cast<std::size_t>(axis)]];
                }
                for (int axis = 0; axis < d; ++axis) {
                    w[axis] =
                        std::sqrt(2.0) * cw.sigma * gh.nodes[idx[static_cast<std::size_t>(d + axis)]];
                    wgt *= gh.weights[idx[static_cast<std::size_t>(d + axis)]];
                }
                pair_total += wgt * kappa4(v, w);
                std::size_t ax = idx.size();
                bool carry_out = false;
                while (ax-- > 0) {
                    if (++idx[ax] < n_nodes) break;
                    idx[ax] = 0;
                    if (ax == 0) carry_out = true;
                }
                if (carry_out) break;
            }
            total += cv.weight * cw.weight * pair_total;
        }
    return 0.5 * total * norm;
}

RelaxationReport moment_relaxation_check(const Kernel& kernel, const InitialDensity& f0,
                                         const std::vector<double>& t_grid,
                                         std::uint64_t total_particles, std::uint64_t seed,
                                         unsigned n_sub, unsigned threads) {
    if (kernel.kind() != Kernel::Kind::maxwell)
        throw std::invalid_argument("moment_relaxation_check: maxwell kernels only");
    const int d = kernel.dimension();

    RelaxationReport report;
    // Two probe densities with the same second moment bracket the linear
    // law dm4/dt = -c (m4 - m4_eq); two evaluations solve for (c, m4_eq).
    const double m2 = f0.second_moment();
    const double sigma_eq = std::sqrt(m2 / d);
    const InitialDensity probe_eq = InitialDensity::gaussian(d, sigma_eq);
    const InitialDensity probe_spread =
        InitialDensity::mixture(d, 0.5, sigma_eq * std::sqrt(0.5), sigma_eq * std::sqrt(1.5));
    const double g1 = m4_derivative_quadrature(kernel, probe_eq);
    const double g2 = m4_derivative_quadrature(kernel, probe_spread);
    const double m41 = probe_eq.fourth_moment();
    const double m42 = probe_spread.fourth_moment();
    const double c = -(g1 - g2) / (m41 - m42);
    report.rate_quadrature = c;
    // The probe with derivative g and moment m4 satisfies g = -c (m4 - m4_eq).
    report.m4_eq_quadrature = m41 + g1 / c;
    report.m4_initial = f0.fourth_moment();

    report.m4 = dsmc_moment_trajectory(kernel, f0, total_particles, t_grid, 4, seed, n_sub,
                                       threads);

    // Fit log |m4(t) - m4_eq| against t where the gap is resolved.
    std::vector<double> xs, ys, sig;
    double prev_gap = std::abs(report.m4_initial - report.m4_eq_quadrature);
    report.monotone = true;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double gap = report.m4.value[k] - report.m4_eq_quadrature;
        const double se = report.m4.stderr_value[k];
        if (std::abs(gap) > prev_gap + 4.0 * se) report.monotone = false;
        prev_gap = std::min(prev_gap, std::abs(gap));
        if (std::abs(gap) > 4.0 * se && se > 0.0) {
            xs.push_back(t_grid[k]);
            ys.push_back(std::log(std::abs(gap)));
            sig.push_back(se / std::abs(gap));
        }
    }
    if (xs.size() >= 3) {
        const FitResult fit = fit_linear(xs, ys, sig);
        report.rate_fitted = -fit.slope;
        report.rate_fit_stderr = fit.slope_stderr;
    }
    return report;
}

} // namespace kaclab
