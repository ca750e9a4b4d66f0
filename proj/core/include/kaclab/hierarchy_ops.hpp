#pragma once

#include <vector>

#include "kaclab/density_table.hpp"
#include "kaclab/discrete_model.hpp"

namespace kaclab {

// Hierarchy operators of the finite-velocity model, acting on label tables
// (DensityTable with cells == m). All are exact linear maps; j is always
// the table order of the *result*.

/// Pair generator restricted to slots (i, s) of an order-j table:
/// (T_{i,s} g)(V) = sum_{c,d} K((v_i, v_s) -> (c,d)) [g(V^{i,s}_{c,d}) - g(V)].
DensityTable apply_pair_T(const DiscreteModel& model, const DensityTable& g, unsigned i,
                          unsigned s);

/// T_j = sum_{i < s} T_{i,s}. Mass-conserving: sum (T_j g) = 0.
DensityTable apply_T(const DiscreteModel& model, const DensityTable& g);

/// Collision operator C_{j+1} = sum_{i in J} C_{i,j+1}: contract slot j+1
/// of an order-(j+1) table after applying T_{i,j+1}.
DensityTable apply_C(const DiscreteModel& model, const DensityTable& g_jplus1);

/// D_j E_j = sum_i C_{i,j+1} [ f(v_i) E(.., no i .., v_{j+1}) + f(v_{j+1}) E(V_j) ].
DensityTable apply_D(const DiscreteModel& model, const DensityTable& e_j,
                     const std::vector<double>& f);

/// D_j^1 E_{j+1} = C_{j+1} E_{j+1}.
DensityTable apply_D1(const DiscreteModel& model, const DensityTable& e_jplus1);

/// D_j^{-1} E_{j-1} = (1/mu) sum_{i != s, ordered} T_{i,s} [ f(v_i) E_{J^i} ].
DensityTable apply_Dm1(const DiscreteModel& model, const DensityTable& e_jminus1,
                       const std::vector<double>& f, double mu, unsigned j);

/// D_j^{-2} E_{j-2} = (1/(2mu)) sum_{i != s, ordered} T_{i,s} [ f(v_i) f(v_s) E_{J^{i,s}} ];
/// zero for j = 1 by convention. Pass E_0 as an order-0 table holding 1.
DensityTable apply_Dm2(const DiscreteModel& model, const DensityTable& e_jminus2,
                       const std::vector<double>& f, double mu, unsigned j);

/// Hierarchy right-hand side for the correlation functions:
/// (T_j/mu) f_j + C_{j+1} f_{j+1}. `marginals[k-1]` holds order k.
DensityTable rhs_bbgky(const DiscreteModel& model, const std::vector<DensityTable>& marginals,
                       double mu, unsigned j);

/// Right-hand side of the correlation-error hierarchy (five terms):
/// (T_j/mu) E_j + D_j E_j + D_j^1 E_{j+1} + D_j^{-1} E_{j-1} + D_j^{-2} E_{j-2}.
/// The stack must hold orders 1..j+1; when j == estack.j_max the missing
/// E_{j+1} is closed to zero only if `closure` is set, otherwise throws.
DensityTable rhs_error_hierarchy(const DiscreteModel& model, const CorrelationStack& estack,
                                 const std::vector<double>& f, double mu, unsigned j,
                                 bool closure = false);

enum class HierarchyOp { T, C, D };

/// Exact induced L1 -> L1 norm (max column sum of absolute values) of the
/// operator at result order j; D takes the reference pmf f.
double operator_l1_norm(const DiscreteModel& model, HierarchyOp op, unsigned j,
                        const std::vector<double>& f = {});

/// Exact L1 -> L1 norm of exp((T_j/mu + D_j) dt), via the dense matrix
/// exponential. The growth-bound check of the two-parameter semigroup.
double semigroup_l1_norm(const DiscreteModel& model, const std::vector<double>& f, double mu,
                         unsigned j, double dt);

} // namespace kaclab
