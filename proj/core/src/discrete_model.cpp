#include "kaclab/discrete_model.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab {

double DiscreteModel::pair_rate(int a, int b) const {
    double s = 0.0;
    for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) s += K(a, b, c, d);
    return s;
}

void DiscreteModel::recompute_lambda() {
    lambda_pair = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) lambda_pair = std::max(lambda_pair, pair_rate(a, b));
}

void DiscreteModel::validate() const {
    if (m < 2) throw std::invalid_argument("DiscreteModel: need at least 2 labels");
    if (kernel.size() != static_cast<std::size_t>(m) * m * m * m)
        throw std::invalid_argument("DiscreteModel: kernel size != m^4");
    if (!values.empty() && values.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("DiscreteModel: values size != m");
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    if (K(a, b, c, d) < 0.0)
                        throw std::invalid_argument("DiscreteModel: negative rate");
                    if (std::abs(K(a, b, c, d) - K(b, a, d, c)) > 1e-12)
                        throw std::invalid_argument("DiscreteModel: exchange symmetry violated");
                    if (std::abs(K(a, b, c, d) - K(c, d, a, b)) > 1e-12)
                        throw std::invalid_argument("DiscreteModel: reversibility violated");
                }
}

DiscreteModel make_zero_model(int m) {
    DiscreteModel model;
    model.m = m;
    model.kernel.assign(static_cast<std::size_t>(m) * m * m * m, 0.0);
    model.lambda_pair = 0.0;
    return model;
}

DiscreteModel make_constant_model(int m, double kappa) {
    DiscreteModel model = make_zero_model(m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d)
                    if (!(a == c && b == d)) model.K_ref(a, b, c, d) = kappa;
    model.recompute_lambda();
    return model;
}

namespace {
// Index of the unordered label pair {a, b}, a <= b.
int pair_index(int a, int b, int m) {
    if (a > b) std::swap(a, b);
    return a * m - a * (a - 1) / 2 + (b - a);
}
} // namespace

DiscreteModel make_random_reversible_model(int m, std::uint64_t seed, double lambda_target) {
    DiscreteModel model = make_zero_model(m);
    const int n_pairs = m * (m + 1) / 2;
    std::vector<double> rho(static_cast<std::size_t>(n_pairs) * n_pairs, 0.0);
    CounterRng rng(seed, 0, 11);
    for (int p = 0; p < n_pairs; ++p)
        for (int q = p; q < n_pairs; ++q) {
            const double r = 0.1 + 0.9 * rng.uniform();
            rho[static_cast<std::size_t>(p) * n_pairs + q] = r;
            rho[static_cast<std::size_t>(q) * n_pairs + p] = r;
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    if (a == c && b == d) continue; // drop exact no-ops
                    model.K_ref(a, b, c, d) =
                        rho[static_cast<std::size_t>(pair_index(a, b, m)) * n_pairs +
                            pair_index(c, d, m)];
                }
    model.recompute_lambda();
    if (lambda_target > 0.0 && model.lambda_pair > 0.0) {
        const double s = lambda_target / model.lambda_pair;
        for (double& k : model.kernel) k *= s;
        model.lambda_pair = lambda_target;
    }
    model.validate();
    return model;
}

DiscreteModel make_energy_model(std::vector<double> values, std::uint64_t seed,
                                double lambda_target) {
    const int m = static_cast<int>(values.size());
    DiscreteModel model = make_random_reversible_model(m, seed, 0.0);
    model.values = values;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    const double ein = values[a] * values[a] + values[b] * values[b];
                    const double eout = values[c] * values[c] + values[d] * values[d];
                    if (std::abs(ein - eout) > 1e-12) model.K_ref(a, b, c, d) = 0.0;
                }
    model.recompute_lambda();
    if (lambda_target > 0.0 && model.lambda_pair > 0.0) {
        const double s = lambda_target / model.lambda_pair;
        for (double& k : model.kernel) k *= s;
        model.lambda_pair = lambda_target;
    }
    model.validate();
    return model;
}

DiscreteCollider::DiscreteCollider(const DiscreteModel& model) : model_(model) {
    model_.validate();
    if (model_.values.empty())
        throw std::invalid_argument("DiscreteCollider: model needs velocity values");
}

int DiscreteCollider::label_of(double u) const {
    int best = 0;
    double dist = std::abs(u - model_.values[0]);
    for (int a = 1; a < model_.m; ++a) {
        const double d = std::abs(u - model_.values[static_cast<std::size_t>(a)]);
        if (d < dist) { dist = d; best = a; }
    }
    return best;
}

bool DiscreteCollider::propose(Vec& v, Vec& w, CounterRng& rng, Vec* omega_out) const {
    const int a = label_of(v[0]);
    const int b = label_of(w[0]);
    // One draw covers thinning and outcome choice: pick (c,d) with
    // probability K((a,b)->(c,d)) / lambda_pair, otherwise a null event.
    double u = rng.uniform() * model_.lambda_pair;
    for (int c = 0; c < model_.m; ++c)
        for (int d = 0; d < model_.m; ++d) {
            u -= model_.K(a, b, c, d);
            if (u < 0.0) {
                v[0] = model_.values[static_cast<std::size_t>(c)];
                w[0] = model_.values[static_cast<std::size_t>(d)];
                if (omega_out) {
                    *omega_out = Vec{};
                    (*omega_out)[0] = static_cast<double>(c * model_.m + d);
                }
                return true;
            }
        }
    return false;
}

} // namespace kaclab
