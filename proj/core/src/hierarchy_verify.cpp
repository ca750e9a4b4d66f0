#include "kaclab/hierarchy_verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kaclab/boltzmann_ref.hpp"
#include "kaclab/correlation.hpp"
#include "kaclab/dyson.hpp"
#include "kaclab/fit.hpp"
#include "kaclab/hierarchy_ops.hpp"

namespace kaclab {

namespace {

CorrelationStack error_stack(const std::vector<DensityTable>& marginals,
                             const std::vector<double>& f, unsigned j_max) {
    return correlation_stack(marginals, pmf_table(f), j_max);
}

} // namespace

unsigned NMaxPolicy::resolve(double mu) const { return default_n_max(mu, tail_tol) + margin; }

std::vector<ResidualRecord> hierarchy_residuals(const DiscreteModel& model, double mu,
                                                const std::vector<double>& f0, double t,
                                                unsigned j_check, unsigned j_stack,
                                                double fd_h, unsigned threads,
                                                const NMaxPolicy& policy) {
    if (j_stack < j_check)
        throw std::invalid_argument("hierarchy_residuals: j_stack must cover j_check");
    if (t - fd_h < 0.0)
        throw std::invalid_argument("hierarchy_residuals: need t - fd_h >= 0");
    const unsigned n_max = policy.resolve(mu);
    const unsigned marg_depth = std::max(j_check + 1, j_stack);

    SectorState state = make_initial_sector_state(model, mu, f0, n_max);
    const std::vector<double> times{t - fd_h, t, t + fd_h};
    const std::vector<std::vector<double>> f_at =
        solve_discrete_boltzmann(model, f0, times, std::min(1e-3, fd_h));

    std::vector<std::vector<DensityTable>> marg(3);
    std::vector<CorrelationStack> errs(3);
    for (int k = 0; k < 3; ++k) {
        evolve_sectors(state, model, times[static_cast<std::size_t>(k)], threads);
        marg[static_cast<std::size_t>(k)] = exact_marginals(state, marg_depth);
        errs[static_cast<std::size_t>(k)] =
            error_stack(marg[static_cast<std::size_t>(k)], f_at[static_cast<std::size_t>(k)],
                        j_stack);
    }

    std::vector<ResidualRecord> out;
    for (unsigned j = 1; j <= j_check; ++j) {
        ResidualRecord rec;
        rec.j = j;
        rec.mu = mu;
        rec.t = t;
        rec.closure_used = (j == j_stack);

        DensityTable dfdt = marg[2][j - 1];
        dfdt -= marg[0][j - 1];
        dfdt *= 1.0 / (2.0 * fd_h);
        DensityTable rhs = rhs_bbgky(model, marg[1], mu, j);
        rec.bbgky = l1_bin_distance(dfdt, rhs);

        DensityTable dedt = errs[2].order(j);
        dedt -= errs[0].order(j);
        dedt *= 1.0 / (2.0 * fd_h);
        DensityTable rhs_e =
            rhs_error_hierarchy(model, errs[1], f_at[1], mu, j, rec.closure_used);
        rec.error_hierarchy = l1_bin_distance(dedt, rhs_e);
        out.push_back(rec);
    }
    return out;
}

double limiting_hierarchy_residual(const DiscreteModel& model, const std::vector<double>& f,
                                   unsigned j) {
    const auto m = static_cast<std::size_t>(model.m);
    if (f.size() != m) throw std::invalid_argument("limiting_hierarchy_residual: f size != m");
    const std::vector<double> q = discrete_collision_rhs(model, f);

    // Product-rule derivative of f^{(x) j}.
    DensityTable lhs(j, m);
    std::vector<std::size_t> cells(j);
    for (std::size_t flat = 0; flat < lhs.size(); ++flat) {
        lhs.unflatten(flat, cells);
        double acc = 0.0;
        for (unsigned i = 0; i < j; ++i) {
            double term = q[cells[i]];
            for (unsigned l = 0; l < j; ++l)
                if (l != i) term *= f[cells[l]];
            acc += term;
        }
        lhs[flat] = acc;
    }
    const DensityTable rhs = apply_C(model, tensor_power(pmf_table(f), j + 1));
    return l1_bin_distance(lhs, rhs);
}

std::vector<ScalingPoint> oracle_scaling(const DiscreteModel& model,
                                         const std::vector<double>& f0,
                                         const std::vector<double>& t_grid,
                                         const std::vector<double>& mu_list, unsigned j_max,
                                         unsigned threads, const NMaxPolicy& policy) {
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (t_grid[k] <= t_grid[k - 1])
            throw std::invalid_argument("oracle_scaling: t_grid must be increasing");
    const std::vector<std::vector<double>> f_at = solve_discrete_boltzmann(model, f0, t_grid);

    std::vector<ScalingPoint> points;
    for (double mu : mu_list) {
        SectorState state = make_initial_sector_state(model, mu, f0, policy.resolve(mu));
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            evolve_sectors(state, model, t_grid[k], threads);
            const std::vector<DensityTable> marg = exact_marginals(state, j_max);
            const DensityTable fref = pmf_table(f_at[k]);
            const CorrelationStack errs = correlation_stack(marg, fref, j_max);
            const DensityTable zero1(1, fref.cells_per_slot());
            for (unsigned j = 1; j <= j_max; ++j) {
                ScalingPoint p;
                p.j = j;
                p.mu = mu;
                p.t = t_grid[k];
                p.dist = l1_bin_distance(marg[j - 1], tensor_power(fref, j));
                DensityTable zero(j, fref.cells_per_slot());
                p.e_norm = l1_bin_distance(errs.order(j), zero);
                points.push_back(p);
            }
        }
    }
    return points;
}

EnvelopeFit fit_error_envelope(const std::vector<ScalingPoint>& points) {
    // z(j, t, mu) = (1/j) log( ||E_j|| (sqrt(mu)/j)^j ) must sit below
    // log A + B t; take the max over (j, mu) per time, then the smallest
    // nonnegative slope and intercept covering those maxima.
    std::vector<double> times;
    for (const ScalingPoint& p : points)
        if (std::find(times.begin(), times.end(), p.t) == times.end()) times.push_back(p.t);
    std::sort(times.begin(), times.end());
    std::vector<double> zmax(times.size(), -1e300);
    for (const ScalingPoint& p : points) {
        if (p.e_norm <= 0.0) continue;
        const double z =
            std::log(p.e_norm * std::pow(std::sqrt(p.mu) / p.j, static_cast<double>(p.j))) / p.j;
        const std::size_t k = static_cast<std::size_t>(
            std::find(times.begin(), times.end(), p.t) - times.begin());
        zmax[k] = std::max(zmax[k], z);
    }
    EnvelopeFit fit;
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (zmax[k] > -1e299 && zmax[k + 1] > -1e299)
            fit.b = std::max(fit.b, (zmax[k + 1] - zmax[k]) / (times[k + 1] - times[k]));
    double log_a = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (zmax[k] > -1e299) log_a = std::max(log_a, zmax[k] - fit.b * times[k]);
    fit.a = std::exp(log_a);
    return fit;
}

HierarchyReport run_hierarchy_verification(const DiscreteModel& model,
                                           const std::vector<double>& f0,
                                           const VerifyOptions& opt) {
    model.validate();
    HierarchyReport report;

    for (double mu : opt.mu_list) {
        const auto recs = hierarchy_residuals(model, mu, f0, opt.t_residual, opt.j_check,
                                              opt.j_stack, opt.fd_h, opt.threads,
                                              opt.n_max_policy);
        report.residuals.insert(report.residuals.end(), recs.begin(), recs.end());
        report.tail_bound =
            std::max(report.tail_bound, poisson_tail(mu, opt.n_max_policy.resolve(mu)));
    }

    const std::vector<double> f_res = solve_discrete_boltzmann_at(model, f0, opt.t_residual);
    for (unsigned j = 1; j <= opt.j_check; ++j)
        report.limiting.push_back(limiting_hierarchy_residual(model, f_res, j));

    const double c1 = 2.0 * model.lambda_pair;
    for (unsigned j = 1; j <= opt.norm_j_max; ++j) {
        NormRecord rec;
        rec.j = j;
        rec.t_norm = operator_l1_norm(model, HierarchyOp::T, j);
        rec.t_bound = c1 * j * (j - 1.0) / 2.0;
        rec.c_norm = operator_l1_norm(model, HierarchyOp::C, j);
        rec.c_bound = c1 * j;
        rec.d_norm = operator_l1_norm(model, HierarchyOp::D, j, f_res);
        rec.semigroup_norm = semigroup_l1_norm(model, f_res, opt.norm_mu, j, opt.norm_dt);
        rec.semigroup_bound =
            std::exp(c1 * (static_cast<double>(j) * j / opt.norm_mu + j) * opt.norm_dt);
        report.norms.push_back(rec);
    }

    {
        const SectorState dyson_state =
            evolve_master(model, opt.dyson_mu, f0, opt.dyson_t,
                          opt.n_max_policy.resolve(opt.dyson_mu), opt.threads,
                          opt.n_max_policy.tail_tol);
        const DensityTable exact = exact_fj(dyson_state, opt.dyson_j);
        for (unsigned n = 0; n <= opt.dyson_terms; ++n) {
            const DysonResult dy =
                dyson_partial_sum(model, opt.dyson_j, n, opt.dyson_mu, opt.dyson_t, f0);
            DysonGapRecord rec;
            rec.n_terms = n;
            rec.gap = l1_bin_distance(dy.partial, exact);
            rec.remainder_bound = dy.remainder_bound;
            report.dyson.push_back(rec);
        }
    }

    std::vector<double> t_grid = opt.t_grid;
    if (std::find(t_grid.begin(), t_grid.end(), opt.t_star) == t_grid.end()) {
        t_grid.push_back(opt.t_star);
        std::sort(t_grid.begin(), t_grid.end());
    }
    report.scaling = oracle_scaling(model, f0, t_grid, opt.mu_list, opt.j_stack, opt.threads,
                                    opt.n_max_policy);

    // Fitted constants. G: smallest constant with dist <= G j^2 / mu on the
    // measured t_star points.
    for (const ScalingPoint& p : report.scaling)
        if (p.t == opt.t_star)
            report.g_fit = std::max(report.g_fit, p.mu * p.dist / (static_cast<double>(p.j) * p.j));

    // alpha per order from the mu-decay of ||E_j|| at t_star.
    report.alpha_per_j.assign(opt.j_stack + 1, 0.0);
    for (unsigned j = 1; j <= opt.j_stack; ++j) {
        std::vector<double> mus, es;
        for (const ScalingPoint& p : report.scaling)
            if (p.j == j && p.t == opt.t_star && p.e_norm > 0.0) {
                mus.push_back(p.mu);
                es.push_back(p.e_norm);
            }
        if (mus.size() >= 3) {
            const FitResult fit = fit_powerlaw(mus, es);
            report.alpha_per_j[j] = -fit.slope / static_cast<double>(j);
        }
    }
    report.alpha = 0.0;
    for (unsigned j = 2; j <= opt.j_stack; ++j)
        if (report.alpha_per_j[j] > 0.0)
            report.alpha = (report.alpha == 0.0) ? report.alpha_per_j[j]
                                                 : std::min(report.alpha, report.alpha_per_j[j]);

    const EnvelopeFit envelope = fit_error_envelope(report.scaling);
    report.a_fit = envelope.a;
    report.b_fit = envelope.b;

    // Short-time bound on E_1 with the fitted envelope.
    report.e1_bound_margin = 1e300;
    for (const ScalingPoint& p : report.scaling)
        if (p.j == 1 && p.e_norm > 0.0) {
            const double bound = p.t * report.a_fit * report.a_fit *
                                 std::exp(2.0 * report.b_fit * p.t) * 4.0 / p.mu;
            report.e1_bound_margin = std::min(report.e1_bound_margin, bound / p.e_norm);
        }
    return report;
}

} // namespace kaclab
