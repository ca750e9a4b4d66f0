#include "kaclab/hierarchy_ops.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace kaclab {

namespace {

std::size_t slot_stride(const DensityTable& g, unsigned slot) {
    std::size_t s = 1;
    for (unsigned l = g.order() - 1; l > slot; --l) s *= g.cells_per_slot();
    return s;
}

void check_label_table(const DiscreteModel& model, const DensityTable& g) {
    if (g.cells_per_slot() != static_cast<std::size_t>(model.m))
        throw std::invalid_argument("hierarchy op: table cells != model labels");
}

// out += T_{i,s} g (both order j).
void accumulate_pair_T(const DiscreteModel& model, const DensityTable& g, unsigned i, unsigned s,
                       DensityTable& out) {
    const int m = model.m;
    const std::size_t stride_i = slot_stride(g, i);
    const std::size_t stride_s = slot_stride(g, s);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const int vi = static_cast<int>(flat / stride_i) % m;
        const int vs = static_cast<int>(flat / stride_s) % m;
        double acc = 0.0;
        for (int c = 0; c < m; ++c)
            for (int d = 0; d < m; ++d) {
                const double rate = model.K(vi, vs, c, d);
                if (rate <= 0.0) continue;
                const std::size_t jump = flat + (c - vi) * stride_i + (d - vs) * stride_s;
                acc += rate * (g[jump] - g[flat]);
            }
        out[flat] += acc;
    }
}

// out(V_j) += sum over the last slot of g (order j+1).
void contract_last_slot(const DensityTable& g, DensityTable& out) {
    const std::size_t m = g.cells_per_slot();
    for (std::size_t head = 0; head < out.size(); ++head) {
        double acc = 0.0;
        for (std::size_t last = 0; last < m; ++last) acc += g[head * m + last];
        out[head] += acc;
    }
}

// Order-(j+1) table X(V_{j+1}) = f(v_i) E(V_{j+1} without slot i); the
// remaining slots keep their relative order.
DensityTable lift_drop_slot(const DensityTable& e, const std::vector<double>& f, unsigned i,
                            unsigned jp1) {
    const std::size_t m = e.cells_per_slot();
    DensityTable x(jp1, m);
    std::vector<std::size_t> cells(jp1);
    std::vector<std::size_t> sub(jp1 - 1);
    for (std::size_t flat = 0; flat < x.size(); ++flat) {
        x.unflatten(flat, cells);
        std::size_t k = 0;
        for (unsigned l = 0; l < jp1; ++l)
            if (l != i) sub[k++] = cells[l];
        x[flat] = f[cells[i]] * e[e.flat_index(sub)];
    }
    return x;
}

} // namespace

DensityTable apply_pair_T(const DiscreteModel& model, const DensityTable& g, unsigned i,
                          unsigned s) {
    check_label_table(model, g);
    if (i >= g.order() || s >= g.order() || i == s)
        throw std::invalid_argument("apply_pair_T: bad slot pair");
    DensityTable out(g.order(), g.cells_per_slot());
    accumulate_pair_T(model, g, i, s, out);
    return out;
}

DensityTable apply_T(const DiscreteModel& model, const DensityTable& g) {
    check_label_table(model, g);
    DensityTable out(g.order(), g.cells_per_slot());
    for (unsigned i = 0; i + 1 < g.order(); ++i)
        for (unsigned s = i + 1; s < g.order(); ++s) accumulate_pair_T(model, g, i, s, out);
    return out;
}

DensityTable apply_C(const DiscreteModel& model, const DensityTable& g_jplus1) {
    check_label_table(model, g_jplus1);
    if (g_jplus1.order() < 2) throw std::invalid_argument("apply_C: input order must be >= 2");
    const unsigned j = g_jplus1.order() - 1;
    DensityTable out(j, g_jplus1.cells_per_slot());
    DensityTable scratch(g_jplus1.order(), g_jplus1.cells_per_slot());
    for (unsigned i = 0; i < j; ++i) {
        std::fill(scratch.data().begin(), scratch.data().end(), 0.0);
        accumulate_pair_T(model, g_jplus1, i, j, scratch);
        contract_last_slot(scratch, out);
    }
    return out;
}

DensityTable apply_D(const DiscreteModel& model, const DensityTable& e_j,
                     const std::vector<double>& f) {
    check_label_table(model, e_j);
    const unsigned j = e_j.order();
    if (j < 1) throw std::invalid_argument("apply_D: order must be >= 1");
    const std::size_t m = e_j.cells_per_slot();
    DensityTable out(j, m);
    DensityTable x(j + 1, m);
    DensityTable scratch(j + 1, m);
    std::vector<std::size_t> cells(j + 1);
    for (unsigned i = 0; i < j; ++i) {
        // X = f(v_i) E(slots J^i + {j+1}) + f(v_{j+1}) E(V_j)
        x = lift_drop_slot(e_j, f, i, j + 1);
        for (std::size_t flat = 0; flat < x.size(); ++flat) {
            x.unflatten(flat, cells);
            x[flat] += f[cells[j]] * e_j[flat / m]; // head slots are V_j
        }
        std::fill(scratch.data().begin(), scratch.data().end(), 0.0);
        accumulate_pair_T(model, x, i, j, scratch);
        contract_last_slot(scratch, out);
    }
    return out;
}

DensityTable apply_D1(const DiscreteModel& model, const DensityTable& e_jplus1) {
    return apply_C(model, e_jplus1);
}

DensityTable apply_Dm1(const DiscreteModel& model, const DensityTable& e_jminus1,
                       const std::vector<double>& f, double mu, unsigned j) {
    check_label_table(model, e_jminus1);
    if (e_jminus1.order() + 1 != j) throw std::invalid_argument("apply_Dm1: order mismatch");
    const std::size_t m = e_jminus1.cells_per_slot();
    DensityTable out(j, m);
    if (j < 2) return out; // no ordered pairs in J
    for (unsigned i = 0; i < j; ++i) {
        const DensityTable y = lift_drop_slot(e_jminus1, f, i, j);
        for (unsigned s = 0; s < j; ++s)
            if (s != i) accumulate_pair_T(model, y, i, s, out);
    }
    out *= 1.0 / mu;
    return out;
}

DensityTable apply_Dm2(const DiscreteModel& model, const DensityTable& e_jminus2,
                       const std::vector<double>& f, double mu, unsigned j) {
    if (j >= 2 && e_jminus2.order() + 2 != j)
        throw std::invalid_argument("apply_Dm2: order mismatch");
    const auto m = static_cast<std::size_t>(model.m);
    DensityTable out(j, m);
    if (j < 2) return out; // D_1^{-2} = 0 by convention
    // The summand is symmetric under i <-> s and T_{i,s} = T_{s,i}, so the
    // ordered sum with the 1/2 prefactor counts each unordered pair once.
    DensityTable z(j, m);
    std::vector<std::size_t> cells(j);
    std::vector<std::size_t> sub(j - 2);
    for (unsigned i = 0; i + 1 < j; ++i)
        for (unsigned s = i + 1; s < j; ++s) {
            for (std::size_t flat = 0; flat < z.size(); ++flat) {
                z.unflatten(flat, cells);
                std::size_t k = 0;
                for (unsigned l = 0; l < j; ++l)
                    if (l != i && l != s) sub[k++] = cells[l];
                z[flat] = f[cells[i]] * f[cells[s]] * e_jminus2[e_jminus2.flat_index(sub)];
            }
            accumulate_pair_T(model, z, i, s, out);
        }
    out *= 1.0 / mu;
    return out;
}

DensityTable rhs_bbgky(const DiscreteModel& model, const std::vector<DensityTable>& marginals,
                       double mu, unsigned j) {
    if (marginals.size() < j + 1)
        throw std::invalid_argument("rhs_bbgky: need marginals up to order j+1");
    DensityTable out = apply_T(model, marginals[j - 1]);
    out *= 1.0 / mu;
    out += apply_C(model, marginals[j]);
    return out;
}

DensityTable rhs_error_hierarchy(const DiscreteModel& model, const CorrelationStack& estack,
                                 const std::vector<double>& f, double mu, unsigned j,
                                 bool closure) {
    estack.validate();
    if (j < 1 || j > estack.j_max)
        throw std::invalid_argument("rhs_error_hierarchy: order outside the stack");
    const auto m = static_cast<std::size_t>(model.m);
    const DensityTable& e_j = estack.order(j);

    DensityTable out = apply_T(model, e_j);
    out *= 1.0 / mu;
    out += apply_D(model, e_j, f);
    if (j + 1 <= estack.j_max) {
        out += apply_D1(model, estack.order(j + 1));
    } else if (!closure) {
        throw std::invalid_argument("rhs_error_hierarchy: E_{j+1} missing; enable closure");
    } // closure: E_{j+1} = 0 contributes nothing
    if (j >= 2) out += apply_Dm1(model, estack.order(j - 1), f, mu, j);
    if (j == 2) {
        DensityTable e0(0, m);
        e0[0] = estack.e0_is_one ? 1.0 : 0.0;
        out += apply_Dm2(model, e0, f, mu, j);
    } else if (j >= 3) {
        out += apply_Dm2(model, estack.order(j - 2), f, mu, j);
    }
    return out;
}

double operator_l1_norm(const DiscreteModel& model, HierarchyOp op, unsigned j,
                        const std::vector<double>& f) {
    const auto m = static_cast<std::size_t>(model.m);
    const unsigned in_order = (op == HierarchyOp::C) ? j + 1 : j;
    std::size_t dim = 1;
    for (unsigned l = 0; l < in_order; ++l) dim *= m;
    double norm = 0.0;
    DensityTable basis(in_order, m);
    for (std::size_t col = 0; col < dim; ++col) {
        std::fill(basis.data().begin(), basis.data().end(), 0.0);
        basis[col] = 1.0;
        DensityTable image = (op == HierarchyOp::T)   ? apply_T(model, basis)
                             : (op == HierarchyOp::C) ? apply_C(model, basis)
                                                      : apply_D(model, basis, f);
        double colsum = 0.0;
        for (double x : image.data()) colsum += std::abs(x);
        norm = std::max(norm, colsum);
    }
    return norm;
}

double semigroup_l1_norm(const DiscreteModel& model, const std::vector<double>& f, double mu,
                         unsigned j, double dt) {
    const auto m = static_cast<std::size_t>(model.m);
    std::size_t dim = 1;
    for (unsigned l = 0; l < j; ++l) dim *= m;
    Eigen::MatrixXd a(dim, dim);
    DensityTable basis(j, m);
    for (std::size_t col = 0; col < dim; ++col) {
        std::fill(basis.data().begin(), basis.data().end(), 0.0);
        basis[col] = 1.0;
        DensityTable image = apply_T(model, basis);
        image *= 1.0 / mu;
        image += apply_D(model, basis, f);
        for (std::size_t row = 0; row < dim; ++row)
            a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = image[row];
    }
    const Eigen::MatrixXd e = (a * dt).exp();
    double norm = 0.0;
    for (std::size_t col = 0; col < dim; ++col) {
        double colsum = 0.0;
        for (std::size_t row = 0; row < dim; ++row)
            colsum += std::abs(e(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)));
        norm = std::max(norm, colsum);
    }
    return norm;
}

} // namespace kaclab
