#include "kaclab/sector_state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "kaclab/parallel.hpp"

namespace kaclab {

namespace {

double poisson_pmf(double mu, double k) {
    return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

} // namespace

MultisetSpace::MultisetSpace(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < 0) throw std::invalid_argument("MultisetSpace: bad shape");
    // Lexicographic enumeration of count vectors (first label ascending),
    // matching the combinatorial rank used by index_of.
    std::vector<std::uint16_t> counts(static_cast<std::size_t>(m), 0);
    const std::function<void(int, int)> emit = [&](int label, int remaining) {
        if (label == m - 1) {
            counts[static_cast<std::size_t>(label)] = static_cast<std::uint16_t>(remaining);
            states_.insert(states_.end(), counts.begin(), counts.end());
            return;
        }
        for (int x = 0; x <= remaining; ++x) {
            counts[static_cast<std::size_t>(label)] = static_cast<std::uint16_t>(x);
            emit(label + 1, remaining - x);
        }
    };
    emit(0, n);
}

std::size_t MultisetSpace::index_of(const std::uint16_t* counts) const {
    // Rank in the lex enumeration: compositions whose prefix is smaller
    // come first; the telescoped hockey-stick sum gives each digit's
    // contribution in O(1).
    auto binom = [](double top, int k) {
        double out = 1.0;
        for (int i = 1; i <= k; ++i) out *= (top - (k - i)) / static_cast<double>(i);
        return out;
    };
    std::size_t rank = 0;
    int rem = n_;
    for (int i = 0; i < m_ - 1; ++i) {
        const int k = m_ - 1 - i; // free labels after i
        const int v = counts[static_cast<std::size_t>(i)];
        // sum_{x=0}^{v-1} C(rem - x + k - 1, k - 1) = C(rem + k, k) - C(rem - v + k, k)
        const double cnt = binom(rem + k, k) - binom(rem - v + k, k);
        rank += static_cast<std::size_t>(std::llround(cnt));
        rem -= v;
    }
    return rank;
}

double poisson_tail(double mu, unsigned n_max) {
    double tail = 0.0;
    for (unsigned k = n_max + 1;; ++k) {
        const double term = poisson_pmf(mu, static_cast<double>(k));
        tail += term;
        if (term < 1e-300 || term < 1e-16 * tail) break;
        if (k > n_max + 10000) break;
    }
    return tail;
}

unsigned default_n_max(double mu, double tail_tol) {
    if (!(mu > 0.0)) throw std::invalid_argument("default_n_max: mu must be positive");
    auto n = static_cast<unsigned>(
        std::ceil(mu + std::max(10.0, 8.0 * std::sqrt(mu))));
    while (poisson_tail(mu, n) > tail_tol) ++n;
    return n;
}

double SectorState::total_probability() const {
    double total = 0.0;
    for (unsigned n = 0; n <= n_max; ++n) {
        double s = 0.0;
        for (double x : sectors[n]) s += x;
        total += poisson_pmf(mu, static_cast<double>(n)) * s;
    }
    return total;
}

double SectorState::max_sector_drift() const {
    double drift = 0.0;
    for (unsigned n = 0; n <= n_max; ++n) {
        double s = 0.0;
        for (double x : sectors[n]) s += x;
        drift = std::max(drift, std::abs(s - 1.0));
    }
    return drift;
}

SectorState make_initial_sector_state(const DiscreteModel& model, double mu,
                                      const std::vector<double>& f0, unsigned n_max) {
    model.validate();
    if (f0.size() != static_cast<std::size_t>(model.m))
        throw std::invalid_argument("make_initial_sector_state: f0 size != m");
    double mass = 0.0;
    for (double p : f0) {
        if (p < 0.0) throw std::invalid_argument("make_initial_sector_state: negative pmf entry");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-12)
        throw std::invalid_argument("make_initial_sector_state: f0 must sum to 1");

    SectorState state;
    state.mu = mu;
    state.n_max = n_max;
    state.tail_bound = poisson_tail(mu, n_max);
    state.sectors.resize(n_max + 1);
    state.spaces.resize(n_max + 1);
    for (unsigned n = 0; n <= n_max; ++n) {
        state.spaces[n] = std::make_shared<MultisetSpace>(model.m, static_cast<int>(n));
        const MultisetSpace& space = *state.spaces[n];
        std::vector<double>& p = state.sectors[n];
        p.resize(space.size());
        // i.i.d. multiset law: multinomial(n, f0), evaluated in log space.
        for (std::size_t s = 0; s < space.size(); ++s) {
            const std::uint16_t* nu = space.counts(s);
            double logp = std::lgamma(static_cast<double>(n) + 1.0);
            bool zero = false;
            for (int a = 0; a < model.m; ++a) {
                const double na = nu[a];
                if (na > 0.0 && f0[static_cast<std::size_t>(a)] <= 0.0) { zero = true; break; }
                logp -= std::lgamma(na + 1.0);
                if (na > 0.0) logp += na * std::log(f0[static_cast<std::size_t>(a)]);
            }
            p[s] = zero ? 0.0 : std::exp(logp);
        }
    }
    return state;
}

namespace {

// Sparse generator of one sector in the multiset-class representation.
struct SectorGenerator {
    struct Transition {
        double gain;          // cnt * K * mult(nu)/mult(nu')
        std::uint32_t target;
    };
    std::vector<Transition> transitions;
    std::vector<std::size_t> row_begin; // size states+1
    std::vector<double> loss;           // sum of cnt * K per state

    void apply(const std::vector<double>& y, std::vector<double>& out) const {
        const std::size_t n_states = loss.size();
        for (std::size_t s = 0; s < n_states; ++s) {
            double acc = -loss[s] * y[s];
            for (std::size_t tr = row_begin[s]; tr < row_begin[s + 1]; ++tr)
                acc += transitions[tr].gain * y[transitions[tr].target];
            out[s] = acc;
        }
    }
};

SectorGenerator build_generator(const DiscreteModel& model, const MultisetSpace& space) {
    SectorGenerator gen;
    const int m = model.m;
    gen.loss.assign(space.size(), 0.0);
    gen.row_begin.assign(space.size() + 1, 0);
    std::vector<std::uint16_t> work(static_cast<std::size_t>(m));
    for (std::size_t s = 0; s < space.size(); ++s) {
        const std::uint16_t* nu = space.counts(s);
        for (int a = 0; a < m; ++a) {
            if (nu[a] == 0) continue;
            for (int b = a; b < m; ++b) {
                if (nu[b] == 0) continue;
                const double cnt = (a == b) ? 0.5 * nu[a] * (nu[a] - 1.0)
                                            : static_cast<double>(nu[a]) * nu[b];
                if (cnt <= 0.0) continue;
                for (int c = 0; c < m; ++c)
                    for (int d = 0; d < m; ++d) {
                        const double rate = model.K(a, b, c, d);
                        if (rate <= 0.0) continue;
                        gen.loss[s] += cnt * rate;
                        std::copy(nu, nu + m, work.begin());
                        // nu' = nu - e_a - e_b + e_c + e_d, and the exact
                        // multiplicity ratio mult(nu)/mult(nu') built from
                        // the four changed counts.
                        double ratio = 1.0;
                        ratio /= work[static_cast<std::size_t>(a)];
                        --work[static_cast<std::size_t>(a)];
                        ratio /= work[static_cast<std::size_t>(b)];
                        --work[static_cast<std::size_t>(b)];
                        ++work[static_cast<std::size_t>(c)];
                        ratio *= work[static_cast<std::size_t>(c)];
                        ++work[static_cast<std::size_t>(d)];
                        ratio *= work[static_cast<std::size_t>(d)];
                        const std::size_t target = space.index_of(work.data());
                        gen.transitions.push_back(
                            {cnt * rate * ratio, static_cast<std::uint32_t>(target)});
                        ++gen.row_begin[s + 1];
                    }
            }
        }
    }
    for (std::size_t s = 0; s < space.size(); ++s) gen.row_begin[s + 1] += gen.row_begin[s];
    return gen;
}

} // namespace

void evolve_sectors(SectorState& state, const DiscreteModel& model, double t_target,
                    unsigned threads) {
    if (t_target < state.t)
        throw std::invalid_argument("evolve_sectors: t_target precedes the state clock");
    const double span = t_target - state.t;
    if (span == 0.0) return;
    if (model.lambda_pair <= 0.0) { // free evolution
        state.t = t_target;
        return;
    }
    const double n2 = static_cast<double>(state.n_max) * static_cast<double>(state.n_max);
    const double h_bound = 0.1 * state.mu / (model.lambda_pair * std::max(1.0, n2));
    const auto steps = static_cast<std::size_t>(std::ceil(span / h_bound));
    const double h = span / static_cast<double>(steps);

    parallel_for(state.n_max + 1, threads, [&](std::size_t n) {
        if (n < 2) return; // no pairs, sector is constant
        const SectorGenerator gen = build_generator(model, *state.spaces[n]);
        std::vector<double>& y = state.sectors[n];
        const std::size_t sz = y.size();
        std::vector<double> k1(sz), k2(sz), k3(sz), k4(sz), tmp(sz);
        const double inv_mu = 1.0 / state.mu;
        for (std::size_t step = 0; step < steps; ++step) {
            gen.apply(y, k1);
            for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + 0.5 * h * inv_mu * k1[i];
            gen.apply(tmp, k2);
            for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + 0.5 * h * inv_mu * k2[i];
            gen.apply(tmp, k3);
            for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + h * inv_mu * k3[i];
            gen.apply(tmp, k4);
            const double w = h * inv_mu / 6.0;
            for (std::size_t i = 0; i < sz; ++i)
                y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    });
    state.t = t_target;
}

SectorState evolve_master(const DiscreteModel& model, double mu, const std::vector<double>& f0,
                          double t, unsigned n_max, unsigned threads, double tail_tol) {
    const double tail = poisson_tail(mu, n_max);
    if (tail > tail_tol)
        throw std::invalid_argument(
            "evolve_master: Poisson tail beyond n_max exceeds the tolerance; need n_max >= " +
            std::to_string(default_n_max(mu, tail_tol)));
    SectorState state = make_initial_sector_state(model, mu, f0, n_max);
    evolve_sectors(state, model, t, threads);
    return state;
}

DensityTable exact_fj(const SectorState& state, unsigned j) {
    const int m = state.spaces.empty() ? 0 : state.spaces[0]->m();
    if (j > state.n_max) throw std::invalid_argument("exact_fj: j exceeds n_max");
    DensityTable table(j, static_cast<std::size_t>(m));
    if (j == 0) { // conventions: f^mu_0 = 1
        table[0] = 1.0;
        return table;
    }

    // Accumulate on j-multisets sigma: every sector state nu contributes
    // Poi(n-j; mu) ((n-j)!/n!) prod_a (nu_a)_(sigma_a) p(nu) to each
    // sub-multiset sigma of size j.
    const MultisetSpace sigma_space(m, static_cast<int>(j));
    std::vector<double> acc(sigma_space.size(), 0.0);
    std::vector<std::uint16_t> sigma(static_cast<std::size_t>(m), 0);

    for (unsigned n = j; n <= state.n_max; ++n) {
        const double k = static_cast<double>(n - j);
        double coef = poisson_pmf(state.mu, k);
        for (unsigned i = 0; i < j; ++i) coef /= static_cast<double>(n - i);
        const MultisetSpace& space = *state.spaces[n];
        const std::vector<double>& p = state.sectors[n];
        for (std::size_t s = 0; s < space.size(); ++s) {
            const double ps = p[s];
            if (ps == 0.0) continue;
            const std::uint16_t* nu = space.counts(s);
            // Depth-first over sub-multisets of size j with falling-factorial weights.
            const std::function<void(int, unsigned, double)> descend =
                [&](int label, unsigned remaining, double weight) {
                    if (label == m - 1) {
                        if (remaining > nu[label]) return;
                        double w = weight;
                        for (unsigned x = 0; x < remaining; ++x)
                            w *= static_cast<double>(nu[label]) - x;
                        sigma[static_cast<std::size_t>(label)] =
                            static_cast<std::uint16_t>(remaining);
                        acc[sigma_space.index_of(sigma.data())] += coef * ps * w;
                        return;
                    }
                    double w = weight;
                    for (unsigned x = 0; x <= std::min<unsigned>(remaining, nu[label]); ++x) {
                        sigma[static_cast<std::size_t>(label)] = static_cast<std::uint16_t>(x);
                        if (x > 0) w *= static_cast<double>(nu[label]) - (x - 1);
                        descend(label + 1, remaining - x, w);
                    }
                };
            descend(0, j, 1.0);
        }
    }

    // Expand the multiset accumulator onto the ordered-tuple table.
    std::vector<std::size_t> cells(j);
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
        table.unflatten(flat, cells);
        std::fill(sigma.begin(), sigma.end(), 0);
        for (std::size_t c : cells) ++sigma[c];
        table[flat] = acc[sigma_space.index_of(sigma.data())];
    }
    table.truncation_mass = poisson_tail(state.mu, state.n_max - j);
    return table;
}

std::vector<DensityTable> exact_marginals(const SectorState& state, unsigned j_max) {
    std::vector<DensityTable> out;
    out.reserve(j_max);
    for (unsigned j = 1; j <= j_max; ++j) out.push_back(exact_fj(state, j));
    return out;
}

} // namespace kaclab
