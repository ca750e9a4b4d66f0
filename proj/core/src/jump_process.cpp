#include "kaclab/jump_process.hpp"

#include <stdexcept>

namespace kaclab {

bool KernelCollider::propose(Vec& v, Vec& w, CounterRng& rng, Vec* omega_out) const {
    const Vec omega = kernel_.sample_uniform_param(rng);
    // Acceptance B * measure / cap is <= 1 because cap = b_max * measure.
    const double accept = kernel_.density(omega, v, w) * kernel_.angular_measure() /
                          kernel_.pair_intensity_cap();
    if (rng.uniform() >= accept) return false;
    scatter(v, w, omega, kernel_.dimension());
    if (omega_out) *omega_out = omega;
    return true;
}

void advance(ParticleState& state, const PairCollider& collider, double mu,
             double t_target, CounterRng& rng, JumpStats* stats,
             std::vector<ScatterEvent>* events) {
    if (t_target < state.t)
        throw std::invalid_argument("advance: t_target precedes the state clock");
    if (!(mu > 0.0)) throw std::invalid_argument("advance: mu must be positive");

    const std::uint64_t n = state.size();
    if (n < 2) {
        state.t = t_target;
        return;
    }
    // N is conserved, so the candidate rate is constant along the trajectory.
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double candidate_rate = pairs * collider.majorant() / mu;
    if (candidate_rate <= 0.0) {
        state.t = t_target;
        return;
    }

    for (;;) {
        state.t += rng.exponential() / candidate_rate;
        if (state.t >= t_target) {
            state.t = t_target;
            return;
        }
        std::uint64_t i = rng.uniform_below(n);
        std::uint64_t j = rng.uniform_below(n - 1);
        if (j >= i) ++j;
        if (i > j) std::swap(i, j);

        if (stats) ++stats->candidates;
        Vec omega;
        if (collider.propose(state.velocities[i], state.velocities[j], rng, &omega)) {
            if (stats) ++stats->accepted;
            if (events)
                events->push_back(ScatterEvent{static_cast<std::uint32_t>(i),
                                               static_cast<std::uint32_t>(j), omega, state.t});
        }
    }
}

void advance(ParticleState& state, const Kernel& kernel, double mu,
             double t_target, CounterRng& rng, JumpStats* stats,
             std::vector<ScatterEvent>* events) {
    KernelCollider collider(kernel);
    advance(state, collider, mu, t_target, rng, stats, events);
}

std::vector<ParticleState> run_replica(const EnsembleSpec& spec, std::uint64_t replica,
                                       const std::vector<double>& checkpoints,
                                       JumpStats* stats) {
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        if (checkpoints[k] < 0.0 || checkpoints[k] > spec.t_final)
            throw std::invalid_argument("run_replica: checkpoint outside [0, t_final]");
        if (k > 0 && checkpoints[k] < checkpoints[k - 1])
            throw std::invalid_argument("run_replica: checkpoints must be sorted");
    }

    ParticleState state = sample_initial_state(spec, replica);
    CounterRng rng(spec.seed, replica, stream::dynamics);
    KernelCollider collider(spec.kernel);

    std::vector<ParticleState> snapshots;
    snapshots.reserve(checkpoints.size());
    for (double t : checkpoints) {
        advance(state, collider, spec.mu, t, rng, stats);
        snapshots.push_back(state);
    }
    return snapshots;
}

} // namespace kaclab
