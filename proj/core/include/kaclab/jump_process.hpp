#pragma once

#include <cstdint>
#include <vector>

#include "kaclab/ensemble.hpp"
#include "kaclab/kernel.hpp"

namespace kaclab {

/// Minimal pair-collision interface for the uniformization engine. A
/// candidate event proposes an outcome for one pair; `propose` must accept
/// with probability lambda(v, w) / majorant() and, on acceptance, overwrite
/// (v, w) with the post-collision velocities. Null-collision rejection makes
/// the simulation exact in distribution with no time discretization.
class PairCollider {
public:
    virtual ~PairCollider() = default;
    /// Uniform upper bound on the total pair rate lambda(v, w).
    virtual double majorant() const = 0;
    virtual bool propose(Vec& v, Vec& w, CounterRng& rng, Vec* omega_out) const = 0;
};

/// Continuum kernels: propose omega uniformly on the angular domain and
/// accept with B(omega; v-w) * measure / cap.
class KernelCollider final : public PairCollider {
public:
    explicit KernelCollider(const Kernel& kernel) : kernel_(kernel) {}
    double majorant() const override { return kernel_.pair_intensity_cap(); }
    bool propose(Vec& v, Vec& w, CounterRng& rng, Vec* omega_out) const override;

private:
    const Kernel& kernel_;
};

/// Candidate/acceptance counters, for spotting pathological rejection rates.
struct JumpStats {
    std::uint64_t candidates = 0;
    std::uint64_t accepted = 0;
    double acceptance_rate() const {
        return candidates ? static_cast<double>(accepted) / static_cast<double>(candidates) : 0.0;
    }
    JumpStats& operator+=(const JumpStats& o) {
        candidates += o.candidates;
        accepted += o.accepted;
        return *this;
    }
};

/// Advance one trajectory of the jump process with generator
/// (1/mu) sum_{i<j} T_{i,j} to t_target: candidate events at rate
/// (1/mu) * N(N-1)/2 * majorant, uniform pair choice, thinning per the
/// collider. Throws std::invalid_argument when t_target < state.t.
void advance(ParticleState& state, const PairCollider& collider, double mu,
             double t_target, CounterRng& rng, JumpStats* stats = nullptr,
             std::vector<ScatterEvent>* events = nullptr);

/// Kernel convenience overload.
void advance(ParticleState& state, const Kernel& kernel, double mu,
             double t_target, CounterRng& rng, JumpStats* stats = nullptr,
             std::vector<ScatterEvent>* events = nullptr);

/// Snapshots of one replica's trajectory at the given times. Checkpoints
/// must be sorted and lie in [0, t_final]. Deterministic in (seed, replica).
std::vector<ParticleState> run_replica(const EnsembleSpec& spec, std::uint64_t replica,
                                       const std::vector<double>& checkpoints,
                                       JumpStats* stats = nullptr);

} // namespace kaclab
