#pragma once

#include <cstdint>
#include <vector>

#include "kaclab/grid.hpp"
#include "kaclab/jump_process.hpp"

namespace kaclab {

/// Finite-velocity Kac model: m velocity labels and a pair transition rate
/// K((a,b) -> (c,d)). Two structural requirements, checked by validate():
///   exchange symmetry  K((a,b)->(c,d)) = K((b,a)->(d,c))
///   reversibility      K(p->q) = K(q->p)
/// Reversibility makes the forward pair generator take the gain-minus-loss
/// form (T_{i,s} g)(V) = sum_{c,d} K((v_i,v_s)->(c,d)) [g(V^{i,s}_{c,d}) - g(V)]
/// with the same kernel in both terms.
struct DiscreteModel {
    int m = 0;
    std::vector<double> values;  ///< optional velocity values u_a (empty or size m)
    std::vector<double> kernel;  ///< K flattened as ((a*m+b)*m+c)*m+d
    double lambda_pair = 0.0;    ///< max over (a,b) of sum_{c,d} K

    double K(int a, int b, int c, int d) const {
        return kernel[static_cast<std::size_t>(((a * m + b) * m + c) * m + d)];
    }
    double& K_ref(int a, int b, int c, int d) {
        return kernel[static_cast<std::size_t>(((a * m + b) * m + c) * m + d)];
    }
    /// sum_{c,d} K((a,b) -> (c,d)).
    double pair_rate(int a, int b) const;

    void recompute_lambda();
    void validate() const;
};

/// All rates zero.
DiscreteModel make_zero_model(int m);

/// K constant on all transitions except exact no-ops; pair rates are
/// independent of (a,b), so the uniform pmf is stationary.
DiscreteModel make_constant_model(int m, double kappa);

/// Seeded random model satisfying both symmetries, rescaled so that
/// lambda_pair == lambda_target. Rates are assigned per unordered pair of
/// unordered label pairs, which enforces the symmetries by construction.
DiscreteModel make_random_reversible_model(int m, std::uint64_t seed, double lambda_target = 1.0);

/// Like the random model, but transitions are restricted to equal-energy
/// label pairs (u_a^2 + u_b^2 == u_c^2 + u_d^2), so sum_a u_a^2 f_a is
/// conserved by the dynamics.
DiscreteModel make_energy_model(std::vector<double> values, std::uint64_t seed,
                                double lambda_target = 1.0);

/// Runs a discrete model inside the continuum jump engine: particles carry
/// the real values u_a, candidates accept with pair_rate/lambda_pair and
/// outcomes are drawn proportionally to K. Use GridSpec::labels(values)
/// to bin the resulting states.
class DiscreteCollider final : public PairCollider {
public:
    explicit DiscreteCollider(const DiscreteModel& model);
    double majorant() const override { return model_.lambda_pair; }
    bool propose(Vec& v, Vec& w, CounterRng& rng, Vec* omega_out) const override;

private:
    int label_of(double u) const;
    const DiscreteModel& model_;
};

} // namespace kaclab
