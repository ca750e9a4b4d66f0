#include "kaclab/dyson.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "kaclab/hierarchy_ops.hpp"

namespace kaclab {

DysonResult dyson_partial_sum(const DiscreteModel& model, unsigned j, unsigned n_terms,
                              double mu, double t, const std::vector<double>& f0) {
    model.validate();
    if (j < 1) throw std::invalid_argument("dyson_partial_sum: j must be >= 1");
    if (f0.size() != static_cast<std::size_t>(model.m))
        throw std::invalid_argument("dyson_partial_sum: f0 size != m");
    const auto m = static_cast<std::size_t>(model.m);
    const unsigned top = j + n_terms;

    // c2: tightest constant with ||C_{l+1}|| <= c2 * l over the levels used.
    double c2 = 0.0;
    for (unsigned l = j; l <= top; ++l)
        c2 = std::max(c2, operator_l1_norm(model, HierarchyOp::C, l) / static_cast<double>(l));
    if (c2 > 0.0 && t >= 1.0 / (2.0 * c2))
        throw std::invalid_argument("dyson_partial_sum: t outside the convergence regime t < 1/(2 c2)");

    // Block layout of the ladder vector (g_j, ..., g_top).
    std::vector<std::size_t> block_dim(top + 1, 0), block_off(top + 2, 0);
    std::size_t dim = 0;
    for (unsigned l = j; l <= top; ++l) {
        std::size_t d = 1;
        for (unsigned k = 0; k < l; ++k) d *= m;
        block_dim[l] = d;
        block_off[l] = dim;
        dim += d;
    }
    block_off[top + 1] = dim;
    if (dim > 20000)
        throw std::length_error("dyson_partial_sum: ladder dimension too large");

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (unsigned l = j; l <= top; ++l) {
        DensityTable basis(l, m);
        for (std::size_t col = 0; col < block_dim[l]; ++col) {
            std::fill(basis.data().begin(), basis.data().end(), 0.0);
            basis[col] = 1.0;
            DensityTable tg = apply_T(model, basis);
            for (std::size_t row = 0; row < block_dim[l]; ++row)
                a(static_cast<Eigen::Index>(block_off[l] + row),
                  static_cast<Eigen::Index>(block_off[l] + col)) = tg[row] / mu;
            if (l > j) {
                const DensityTable cg = apply_C(model, basis); // maps level l -> l-1
                for (std::size_t row = 0; row < block_dim[l - 1]; ++row)
                    a(static_cast<Eigen::Index>(block_off[l - 1] + row),
                      static_cast<Eigen::Index>(block_off[l] + col)) = cg[row];
            }
        }
    }

    Eigen::VectorXd y0(static_cast<Eigen::Index>(dim));
    for (unsigned l = j; l <= top; ++l) {
        DensityTable f_l = tensor_power([&] {
            DensityTable f1(1, m);
            for (std::size_t c = 0; c < m; ++c) f1[c] = f0[c];
            return f1;
        }(), l);
        for (std::size_t row = 0; row < block_dim[l]; ++row)
            y0(static_cast<Eigen::Index>(block_off[l] + row)) = f_l[row];
    }

    const Eigen::VectorXd yt = (a * t).exp() * y0;

    DysonResult out;
    out.partial = DensityTable(j, m);
    for (std::size_t row = 0; row < block_dim[j]; ++row) out.partial[row] = yt(static_cast<Eigen::Index>(row));
    out.c2 = c2;
    const double q = 2.0 * c2 * t;
    out.remainder_bound =
        (q < 1.0) ? std::pow(2.0, j) * std::pow(q, n_terms + 1) / (1.0 - q)
                  : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace kaclab
