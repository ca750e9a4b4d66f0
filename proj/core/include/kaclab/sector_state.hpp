#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kaclab/density_table.hpp"
#include "kaclab/discrete_model.hpp"

namespace kaclab {

/// Enumeration of size-n multisets over m labels (count vectors summing
/// to n), with O(1) index lookup through a packed key.
class MultisetSpace {
public:
    MultisetSpace(int m, int n);

    int m() const { return m_; }
    int n() const { return n_; }
    std::size_t size() const { return states_.size() / static_cast<std::size_t>(m_); }
    /// Count vector of state s (length m).
    const std::uint16_t* counts(std::size_t s) const {
        return states_.data() + s * static_cast<std::size_t>(m_);
    }
    std::size_t index_of(const std::uint16_t* counts) const;

private:
    int m_;
    int n_;
    std::vector<std::uint16_t> states_; // m counts per state
};

/// Grand-canonical state on a finite velocity set, stored sector by
/// sector. Sector n holds the multiset-class probabilities
///   p^n(nu) = (mass of ordered configurations in class nu) / (n! Poi(n; mu)),
/// i.e. each sector is normalized to total 1 at t = 0 and stays so, while
/// the physical sector mass Poi(n; mu) is reattached analytically. This
/// keeps every stored number O(1) for any mu and n.
struct SectorState {
    double mu = 0.0;
    unsigned n_max = 0;
    double t = 0.0;
    std::vector<std::vector<double>> sectors;            ///< [n][state]
    std::vector<std::shared_ptr<MultisetSpace>> spaces;  ///< [n]
    double tail_bound = 0.0; ///< certified Poisson mass beyond n_max

    /// Sum over sectors of Poi(n; mu) * (sector sum): the represented total
    /// probability; 1 - tail at t = 0 and conserved by the evolution.
    double total_probability() const;
    /// Smallest per-sector normalization: max_n |sector sum - 1|.
    double max_sector_drift() const;
};

/// Exact Poisson tail P(N > n_max) computed by direct summation.
double poisson_tail(double mu, unsigned n_max);

/// Default sector cutoff: ceil(mu + max(10, 8 sqrt(mu))), then raised until
/// the exact tail is <= tail_tol.
unsigned default_n_max(double mu, double tail_tol = 1e-10);

/// Factorized initial data: sector n is the i.i.d. multiset law of f0.
SectorState make_initial_sector_state(const DiscreteModel& model, double mu,
                                      const std::vector<double>& f0, unsigned n_max);

/// Evolve all sectors to t_target with RK4 at the step bound
/// h <= 0.1 mu / (lambda_pair n_max^2); sectors run independently (the
/// generator conserves n) and in parallel.
void evolve_sectors(SectorState& state, const DiscreteModel& model, double t_target,
                    unsigned threads = 0);

/// make_initial_sector_state + evolve_sectors, with the tail precondition
/// checked (throws std::invalid_argument naming the required n_max if the
/// requested cutoff leaves more than tail_tol of Poisson mass).
SectorState evolve_master(const DiscreteModel& model, double mu, const std::vector<double>& f0,
                          double t, unsigned n_max, unsigned threads = 0,
                          double tail_tol = 1e-10);

/// Exact rescaled correlation function on labels: the defining sum over
/// sectors, truncated at n_max. The truncation error in total mass is
/// exactly the Poisson tail beyond n_max - j; it is stored in the table's
/// truncation_mass field.
DensityTable exact_fj(const SectorState& state, unsigned j);

/// f^mu_1 .. f^mu_jmax.
std::vector<DensityTable> exact_marginals(const SectorState& state, unsigned j_max);

} // namespace kaclab
