#pragma once

#include <cstdint>
#include <vector>

#include "kaclab/density_table.hpp"
#include "kaclab/discrete_model.hpp"
#include "kaclab/grid.hpp"
#include "kaclab/initial_density.hpp"
#include "kaclab/kernel.hpp"

namespace kaclab {

/// Collision term of the discrete kinetic equation:
///   rhs(a) = sum_{b,c,d} [ K((c,d)->(a,b)) f(c) f(d) - K((a,b)->(c,d)) f(a) f(b) ].
std::vector<double> discrete_collision_rhs(const DiscreteModel& model,
                                           const std::vector<double>& f);

/// RK4 solution of d/dt f = discrete_collision_rhs(f) observed at the given
/// sorted checkpoints. Mass is conserved by the scheme up to roundoff.
std::vector<std::vector<double>> solve_discrete_boltzmann(const DiscreteModel& model,
                                                          const std::vector<double>& f0,
                                                          const std::vector<double>& checkpoints,
                                                          double h_max = 1e-3);
std::vector<double> solve_discrete_boltzmann_at(const DiscreteModel& model,
                                                const std::vector<double>& f0, double t,
                                                double h_max = 1e-3);

/// Mean-field reference for the kinetic equation: n_sub independent
/// canonical trajectories of M/n_sub particles, each run at intensity
/// parameter equal to its own particle count; the pooled single-particle
/// histogram approximates f(t) with O(n_sub/M) bias. Per-bin standard
/// errors from the spread across sub-trajectories.
DensityTable reference_dsmc(const Kernel& kernel, const InitialDensity& f0,
                            std::uint64_t total_particles, double t, const GridSpec& grid,
                            std::uint64_t seed, unsigned n_sub = 16, unsigned threads = 0);

/// Same reference for a discrete model run inside the continuum engine;
/// returns a labels-grid table.
DensityTable reference_dsmc_discrete(const DiscreteModel& model, const std::vector<double>& f0,
                                     std::uint64_t total_particles, double t,
                                     std::uint64_t seed, unsigned n_sub = 16,
                                     unsigned threads = 0);

/// |v|^p ensemble moments of the DSMC reference at each checkpoint, with
/// standard errors across sub-trajectories.
struct MomentTrajectory {
    std::vector<double> times;
    std::vector<double> value;
    std::vector<double> stderr_value;
};
MomentTrajectory dsmc_moment_trajectory(const Kernel& kernel, const InitialDensity& f0,
                                        std::uint64_t total_particles,
                                        const std::vector<double>& checkpoints, int power,
                                        std::uint64_t seed, unsigned n_sub = 16,
                                        unsigned threads = 0);

/// Relaxation audit for constant (maxwell) kernels: the fourth moment obeys
/// a closed linear ODE whose rate and fixed point are recovered here from
/// first principles by quadrature (two probe densities sharing the second
/// moment), then compared against the simulated relaxation.
struct RelaxationReport {
    double rate_quadrature = 0.0;   ///< c in dm4/dt = -c (m4 - m4_eq)
    double m4_eq_quadrature = 0.0;
    double m4_initial = 0.0;
    MomentTrajectory m4;
    double rate_fitted = 0.0;
    double rate_fit_stderr = 0.0;
    bool monotone = false;          ///< |m4 - m4_eq| nonincreasing along the grid
};
RelaxationReport moment_relaxation_check(const Kernel& kernel, const InitialDensity& f0,
                                         const std::vector<double>& t_grid,
                                         std::uint64_t total_particles, std::uint64_t seed,
                                         unsigned n_sub = 16, unsigned threads = 0);

/// Quadrature evaluation of d/dt E[|v|^4] at state f for a constant kernel
/// (exposed for tests; exact for Gaussian-mixture f up to rule precision).
double m4_derivative_quadrature(const Kernel& kernel, const InitialDensity& f);

} // namespace kaclab
