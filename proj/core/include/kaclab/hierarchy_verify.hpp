#pragma once

#include <cstdint>
#include <vector>

#include "kaclab/density_table.hpp"
#include "kaclab/discrete_model.hpp"
#include "kaclab/sector_state.hpp"

namespace kaclab {

/// L1 residuals of the three hierarchies at one (mu, t), with the time
/// derivative taken by central differences of the exact sector solution.
struct ResidualRecord {
    unsigned j = 0;
    double mu = 0.0;
    double t = 0.0;
    double bbgky = 0.0;            ///< d/dt f_j - (T_j/mu) f_j - C f_{j+1}
    double error_hierarchy = 0.0;  ///< d/dt E_j minus its five-term right side
    bool closure_used = false;     ///< E_{j_max+1} closed to zero in the rhs
};

/// Sector-cutoff policy: default_n_max at tail_tol, plus a flat margin
/// (e.g. to certify the tail of order-j marginals, tail(n_max - j)).
struct NMaxPolicy {
    double tail_tol = 1e-10;
    unsigned margin = 0;
    unsigned resolve(double mu) const;
};

/// Residuals for orders 1..j_check. The error-hierarchy stack is built to
/// depth j_stack (>= j_check); only j == j_stack needs the zero closure.
std::vector<ResidualRecord> hierarchy_residuals(const DiscreteModel& model, double mu,
                                                const std::vector<double>& f0, double t,
                                                unsigned j_check, unsigned j_stack,
                                                double fd_h = 1e-3, unsigned threads = 0,
                                                const NMaxPolicy& policy = {});

/// Residual of the limiting (product-solution) identity at order j:
/// || sum_i Q(f,f)_i (x) f^{rest} - C_{j+1} f^{(x)(j+1)} ||_1 for a pmf f.
double limiting_hierarchy_residual(const DiscreteModel& model, const std::vector<double>& f,
                                   unsigned j);

/// One point of the chaos-scaling study on the exact oracle path.
struct ScalingPoint {
    unsigned j = 0;
    double mu = 0.0;
    double t = 0.0;
    double dist = 0.0;   ///< || f^mu_j - f^{(x) j} ||_1
    double e_norm = 0.0; ///< || E_j ||_1
};

/// Exact distances and correlation-error norms for all (j <= j_max,
/// mu in mu_list) at each time of t_grid.
std::vector<ScalingPoint> oracle_scaling(const DiscreteModel& model,
                                         const std::vector<double>& f0,
                                         const std::vector<double>& t_grid,
                                         const std::vector<double>& mu_list, unsigned j_max,
                                         unsigned threads = 0, const NMaxPolicy& policy = {});

/// Smallest exponential envelope (A e^{B t})^j (j/sqrt(mu))^j covering the
/// measured ||E_j||: returns {A >= 1, B >= 0}.
struct EnvelopeFit {
    double a = 1.0;
    double b = 0.0;
};
EnvelopeFit fit_error_envelope(const std::vector<ScalingPoint>& points);

struct NormRecord {
    unsigned j = 0;
    double t_norm = 0.0, t_bound = 0.0;
    double c_norm = 0.0, c_bound = 0.0;
    double d_norm = 0.0;
    double semigroup_norm = 0.0, semigroup_bound = 0.0; ///< at dt and mu below
};

struct DysonGapRecord {
    unsigned n_terms = 0;
    double gap = 0.0;
    double remainder_bound = 0.0;
};

struct VerifyOptions {
    std::vector<double> mu_list{2.0, 4.0, 8.0};
    std::vector<double> t_grid{0.25, 0.5};
    double t_residual = 0.5;
    double t_star = 0.5;
    unsigned j_stack = 4;
    unsigned j_check = 3;
    double fd_h = 1e-3;
    unsigned norm_j_max = 6;
    double norm_mu = 4.0;
    double norm_dt = 0.25;
    unsigned dyson_terms = 5;
    double dyson_t = 0.05;
    double dyson_mu = 2.0;
    unsigned dyson_j = 1;
    NMaxPolicy n_max_policy;
    unsigned threads = 0;
};

/// Everything the oracle asserts, in one report: residuals of the three
/// hierarchies, exact operator norms against their bounds, Dyson gaps, and
/// the fitted scaling constants.
struct HierarchyReport {
    std::vector<ResidualRecord> residuals; ///< per (j, mu) at t_residual
    std::vector<double> limiting;          ///< per j = 1..j_check at t_residual
    std::vector<NormRecord> norms;         ///< j = 1..norm_j_max
    std::vector<DysonGapRecord> dyson;     ///< n_terms = 0..dyson_terms
    std::vector<ScalingPoint> scaling;     ///< (j, mu, t) grid

    double g_fit = 0.0;        ///< max over (j, mu) of mu * dist / j^2 at t_star
    double a_fit = 1.0;        ///< envelope constants of the error bound
    double b_fit = 0.0;
    std::vector<double> alpha_per_j; ///< -slope(log ||E_j|| vs log mu) / j
    double alpha = 0.0;              ///< min over j >= 2

    double e1_bound_margin = 0.0; ///< min over (mu, t) of bound/||E_1||, >= 1 wanted
    double tail_bound = 0.0;      ///< worst certified Poisson tail in the runs
};

HierarchyReport run_hierarchy_verification(const DiscreteModel& model,
                                           const std::vector<double>& f0,
                                           const VerifyOptions& options);

} // namespace kaclab
