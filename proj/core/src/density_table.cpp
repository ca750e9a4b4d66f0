#include "kaclab/density_table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kaclab {

namespace {
std::size_t g_alloc_limit = 200'000'000; // entries, ~1.6 GB of doubles

std::size_t checked_pow(std::size_t base, unsigned exp) {
    std::size_t out = 1;
    for (unsigned k = 0; k < exp; ++k) {
        if (base != 0 && out > g_alloc_limit / base)
            throw std::length_error(
                "DensityTable: tensor exceeds the allocation budget; raise the "
                "table allocation limit to enable it");
        out *= base;
    }
    return out;
}
} // namespace

std::size_t DensityTable::alloc_limit() { return g_alloc_limit; }
void DensityTable::set_alloc_limit(std::size_t entries) { g_alloc_limit = entries; }

DensityTable::DensityTable(unsigned order, std::size_t cells_per_slot)
    : order_(order), cells_(cells_per_slot) {
    if (cells_per_slot == 0) throw std::invalid_argument("DensityTable: empty cell set");
    data_.assign(checked_pow(cells_per_slot, order), 0.0);
}

std::size_t DensityTable::flat_index(std::span<const std::size_t> cells) const {
    if (cells.size() != order_) throw std::invalid_argument("flat_index: wrong arity");
    std::size_t idx = 0;
    for (std::size_t c : cells) {
        if (c >= cells_) throw std::out_of_range("flat_index: cell out of range");
        idx = idx * cells_ + c;
    }
    return idx;
}

void DensityTable::unflatten(std::size_t flat, std::span<std::size_t> cells) const {
    if (cells.size() != order_) throw std::invalid_argument("unflatten: wrong arity");
    for (unsigned s = order_; s-- > 0;) {
        cells[s] = flat % cells_;
        flat /= cells_;
    }
}

double DensityTable::total_mass() const {
    // Pairwise accumulation keeps merges of split sums bit-reproducible.
    return std::accumulate(data_.begin(), data_.end(), 0.0);
}

double DensityTable::max_abs_diff(const DensityTable& a, const DensityTable& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

DensityTable& DensityTable::operator+=(const DensityTable& o) {
    if (!same_shape(o)) throw std::invalid_argument("DensityTable: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    truncation_mass += o.truncation_mass;
    return *this;
}

DensityTable& DensityTable::operator-=(const DensityTable& o) {
    if (!same_shape(o)) throw std::invalid_argument("DensityTable: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    truncation_mass -= o.truncation_mass;
    return *this;
}

DensityTable& DensityTable::operator*=(double s) {
    for (double& x : data_) x *= s;
    truncation_mass *= s;
    return *this;
}

DensityTable DensityTable::symmetrized() const {
    if (order_ <= 1) return *this;
    std::vector<unsigned> perm(order_);
    std::iota(perm.begin(), perm.end(), 0u);
    DensityTable out(order_, cells_);
    out.truncation_mass = truncation_mass;
    std::vector<std::size_t> cells(order_), permuted(order_);
    double nperm = 0.0;
    do {
        nperm += 1.0;
        for (std::size_t flat = 0; flat < size(); ++flat) {
            unflatten(flat, cells);
            for (unsigned s = 0; s < order_; ++s) permuted[s] = cells[perm[s]];
            out[flat] += (*this)[flat_index(permuted)];
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& x : out.data()) x /= nperm;
    return out;
}

double DensityTable::symmetry_defect() const {
    if (order_ <= 1) return 0.0;
    std::vector<unsigned> perm(order_);
    std::iota(perm.begin(), perm.end(), 0u);
    double defect = 0.0;
    std::vector<std::size_t> cells(order_), permuted(order_);
    do {
        for (std::size_t flat = 0; flat < size(); ++flat) {
            unflatten(flat, cells);
            for (unsigned s = 0; s < order_; ++s) permuted[s] = cells[perm[s]];
            defect = std::max(defect, std::abs((*this)[flat_index(permuted)] - (*this)[flat]));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return defect;
}

void CorrelationStack::validate() const {
    if (tables.size() != j_max)
        throw std::invalid_argument("CorrelationStack: table count != j_max");
    for (unsigned j = 1; j <= j_max; ++j) {
        if (order(j).order() != j)
            throw std::invalid_argument("CorrelationStack: order mismatch");
        if (order(j).cells_per_slot() != order(1).cells_per_slot())
            throw std::invalid_argument("CorrelationStack: grids differ across orders");
    }
}

DensityTable tensor_power(const DensityTable& f, unsigned j) {
    if (f.order() != 1) throw std::invalid_argument("tensor_power: input must have order 1");
    if (j == 0) throw std::invalid_argument("tensor_power: j must be >= 1");
    if (j == 1) return f;
    const std::size_t m = f.cells_per_slot();
    DensityTable out(j, m);
    std::vector<std::size_t> cells(j, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        double p = 1.0;
        std::size_t rest = flat;
        for (unsigned s = j; s-- > 0;) {
            p *= f[rest % m];
            rest /= m;
        }
        out[flat] = p;
    }
    // Mass outside the grid in any slot is missing from the product.
    const double in = f.total_mass();
    const double full = in + f.truncation_mass;
    out.truncation_mass = std::pow(full, j) - std::pow(in, j);
    return out;
}

DensityTable pmf_table(const std::vector<double>& pmf) {
    DensityTable out(1, pmf.size());
    for (std::size_t i = 0; i < pmf.size(); ++i) out[i] = pmf[i];
    return out;
}

double l1_bin_distance(const DensityTable& a, const DensityTable& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("l1_bin_distance: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

} // namespace kaclab
