#include "kaclab/correlation.hpp"

#include <stdexcept>

namespace kaclab {

namespace {

// Accumulate one subset term: out += coeff * g[complement slots] * prod_{i in K} fref[c_i],
// where `mask` has bit i set iff slot i belongs to K and g has order j - |K|.
// The complement table is read on its slots in increasing slot order.
void add_subset_term(DensityTable& out, const DensityTable* g, const DensityTable& fref,
                     unsigned j, unsigned mask, double coeff) {
    const std::size_t m = out.cells_per_slot();
    std::vector<std::size_t> cells(j);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out.unflatten(flat, cells);
        double term = coeff;
        std::size_t gidx = 0;
        for (unsigned s = 0; s < j; ++s) {
            if (mask & (1u << s)) {
                term *= fref[cells[s]];
            } else {
                gidx = gidx * m + cells[s];
            }
        }
        if (g) term *= (*g)[gidx];
        out[flat] += term;
    }
}

DensityTable subset_transform(const std::vector<const DensityTable*>& by_order,
                              const DensityTable& fref, unsigned j, bool alternating) {
    if (j == 0 || j > 25) throw std::invalid_argument("subset transform: bad order");
    if (fref.order() != 1) throw std::invalid_argument("subset transform: fref must be order 1");
    const std::size_t m = fref.cells_per_slot();
    for (unsigned k = 1; k <= j; ++k) {
        const DensityTable* g = by_order[k];
        if (!g) throw std::invalid_argument("subset transform: missing order in stack");
        if (g->order() != k || g->cells_per_slot() != m)
            throw std::invalid_argument("subset transform: grid/order mismatch in stack");
    }

    DensityTable out(j, m);
    for (unsigned mask = 0; mask < (1u << j); ++mask) {
        const unsigned k = static_cast<unsigned>(__builtin_popcount(mask));
        const double coeff = (alternating && (k & 1u)) ? -1.0 : 1.0;
        const DensityTable* g = (k == j) ? nullptr : by_order[j - k]; // order-0 factor is 1
        add_subset_term(out, g, fref, j, mask, coeff);
    }
    return out;
}

} // namespace

DensityTable correlation_error(const std::vector<DensityTable>& fstack,
                               const DensityTable& fref, unsigned j) {
    if (fstack.size() < j) throw std::invalid_argument("correlation_error: stack too short");
    std::vector<const DensityTable*> by_order(j + 1, nullptr);
    for (unsigned k = 1; k <= j; ++k) by_order[k] = &fstack[k - 1];
    return subset_transform(by_order, fref, j, /*alternating=*/true);
}

DensityTable reconstruct_fj(const CorrelationStack& estack,
                            const DensityTable& fref, unsigned j) {
    if (estack.j_max < j) throw std::invalid_argument("reconstruct_fj: stack too short");
    estack.validate();
    std::vector<const DensityTable*> by_order(j + 1, nullptr);
    for (unsigned k = 1; k <= j; ++k) by_order[k] = &estack.order(k);
    return subset_transform(by_order, fref, j, /*alternating=*/false);
}

CorrelationStack correlation_stack(const std::vector<DensityTable>& fstack,
                                   const DensityTable& fref, unsigned j_max) {
    CorrelationStack out;
    out.j_max = j_max;
    out.tables.reserve(j_max);
    for (unsigned j = 1; j <= j_max; ++j)
        out.tables.push_back(correlation_error(fstack, fref, j));
    return out;
}

} // namespace kaclab
