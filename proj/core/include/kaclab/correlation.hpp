#pragma once

#include <vector>

#include "kaclab/density_table.hpp"

namespace kaclab {

/// Correlation error of order j: the signed subset sum
///   E_j = sum_{K subset J} (-1)^{|K|} f_{J\K} (x) fref^{(x) K},
/// evaluated exactly on bins. `fstack[k-1]` must hold the order-k table
/// f_k for k = 1..j; the empty-set order-0 factor is 1. Tables of the
/// complement are embedded on the slots of J\K in increasing slot order,
/// so for exchangeable (slot-symmetric) inputs the result is symmetric.
DensityTable correlation_error(const std::vector<DensityTable>& fstack,
                               const DensityTable& fref, unsigned j);

/// Inverse transform: f_j = sum_{K subset J} E_{J\K} (x) fref^{(x) K} with
/// E_0 = 1. Exact two-sided inverse of correlation_error on bins.
DensityTable reconstruct_fj(const CorrelationStack& estack,
                            const DensityTable& fref, unsigned j);

/// Build the whole stack E_1..E_jmax from f_1..f_jmax.
CorrelationStack correlation_stack(const std::vector<DensityTable>& fstack,
                                   const DensityTable& fref, unsigned j_max);

} // namespace kaclab
