#pragma once

#include <cstdint>
#include <vector>

#include "kaclab/density_table.hpp"
#include "kaclab/ensemble.hpp"
#include "kaclab/grid.hpp"
#include "kaclab/jump_process.hpp"

namespace kaclab {

/// Monte Carlo estimate of one rescaled correlation function: per replica,
/// every ordered j-tuple of distinct particles adds 1/(mu^j R) to its cell.
/// The per-cell expectation is then exactly the cell mass of f^mu_j.
/// Replicas are pre-partitioned into `groups.size()` contiguous blocks whose
/// sub-averages drive error bars and bootstrap resampling.
struct TableEstimate {
    DensityTable table;                 ///< ensemble average, stderr_values filled
    std::vector<DensityTable> groups;   ///< per-group averages, fixed partition
    std::vector<std::uint64_t> group_sizes;
    double truncation_mass = 0.0;       ///< estimated mass outside the grid
    bool underfilled = false;           ///< some replica had N < j
};

struct EstimatorRequest {
    std::vector<double> checkpoints; ///< sorted observation times
    std::vector<unsigned> orders;    ///< j values to estimate
    GridSpec grid = GridSpec::uniform(1, 64, 6.0);
    unsigned groups = 200;           ///< replica groups (error bars / bootstrap)
    unsigned threads = 0;            ///< 0 = hardware
    const PairCollider* collider = nullptr; ///< optional engine override
};

struct EnsembleEstimate {
    std::vector<double> checkpoints;
    std::vector<unsigned> orders;
    /// estimates[c * orders.size() + o] for checkpoint c, order index o.
    std::vector<TableEstimate> estimates;
    JumpStats stats;

    const TableEstimate& at(std::size_t checkpoint, unsigned j) const;
};

/// Simulate the ensemble once and accumulate all requested (checkpoint, j)
/// tables. Deterministic in (spec.seed, request), independent of threads.
EnsembleEstimate estimate_ensemble(const EnsembleSpec& spec, const EstimatorRequest& request);

/// Plain L1 distance plus a replica-group bootstrap around it.
/// `debiased` subtracts the bootstrap estimate of the fold-over noise
/// contribution E||noise||_1, which otherwise dominates the plug-in
/// distance when the true distance is ~0.
struct DistanceEstimate {
    double plain = 0.0;     ///< l1_bin_distance(mean table, ref)
    double debiased = 0.0;  ///< plain minus bootstrap noise bias
    double stderr_value = 0.0;
    unsigned resamples = 0;
};

DistanceEstimate bootstrap_l1_distance(const TableEstimate& est, const DensityTable& ref,
                                       unsigned resamples = 200, std::uint64_t seed = 1);

/// Test-oracle path: the same estimator by explicit enumeration of ordered
/// particle tuples (no histogram reduction). O(N^j) per replica.
DensityTable estimate_fj_enumerated(const EnsembleSpec& spec, double t, unsigned j,
                                    const GridSpec& grid);

} // namespace kaclab
