#pragma once

#include <vector>

#include "kaclab/density_table.hpp"
#include "kaclab/discrete_model.hpp"

namespace kaclab {

/// Partial sum of the iterated-integral expansion of the correlation-function
/// hierarchy around the free semigroups U_l = exp(T_l t / mu): the terms
/// n = 0..n_terms equal, exactly, the order-j component of the truncated
/// ladder ODE  d/dt g_l = (T_l/mu) g_l + C_{l+1} g_{l+1} (g cut at
/// l = j + n_terms), solved here with one dense matrix exponential.
struct DysonResult {
    DensityTable partial;    ///< order-j partial sum at time t
    double c2 = 0.0;         ///< computed constant: max over levels of ||C_{l+1}|| / l
    double remainder_bound = 0.0; ///< 2^j sum_{n > n_terms} (2 c2 t)^n
};

/// Requires t < 1/(2 c2) (series convergence regime); throws otherwise.
DysonResult dyson_partial_sum(const DiscreteModel& model, unsigned j, unsigned n_terms,
                              double mu, double t, const std::vector<double>& f0);

} // namespace kaclab
