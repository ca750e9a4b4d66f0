#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace kaclab {

/// j-fold tensor of bin masses on a shared 1-slot cell set. Entries are
/// dimensionless masses (integrals of the density over cells), so the L1
/// norm is a plain sum. Slot 0 is the most significant index digit.
///
/// The same container holds continuum tables (cells = flattened velocity
/// bins) and discrete-model tables (cells = velocity labels).
class DensityTable {
public:
    DensityTable() = default;
    DensityTable(unsigned order, std::size_t cells_per_slot);

    unsigned order() const { return order_; }
    std::size_t cells_per_slot() const { return cells_; }
    std::size_t size() const { return data_.size(); }

    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::size_t flat_index(std::span<const std::size_t> cells) const;
    /// Decode a flat index into per-slot cells (size must equal order()).
    void unflatten(std::size_t flat, std::span<std::size_t> cells) const;

    double total_mass() const;
    /// max_i |a_i - b_i|; shapes must match.
    static double max_abs_diff(const DensityTable& a, const DensityTable& b);

    bool same_shape(const DensityTable& o) const {
        return order_ == o.order_ && cells_ == o.cells_;
    }

    DensityTable& operator+=(const DensityTable& o);
    DensityTable& operator-=(const DensityTable& o);
    DensityTable& operator*=(double s);

    /// Average over all slot permutations. Cheap identity for order <= 1.
    DensityTable symmetrized() const;
    /// Largest deviation |T(sigma(V)) - T(V)| over a full permutation sweep.
    double symmetry_defect() const;

    /// Mass outside the grid (not represented in the cells).
    double truncation_mass = 0.0;
    /// Optional per-cell standard errors (empty when not estimated).
    std::vector<double> stderr_values;

    /// Allocation guard, in table entries. Oversize j-fold tensors (3D
    /// grids at j >= 3) must be enabled explicitly by raising the budget.
    static std::size_t alloc_limit();
    static void set_alloc_limit(std::size_t entries);

private:
    unsigned order_ = 0;
    std::size_t cells_ = 0;
    std::vector<double> data_;
};

/// Family {E_1, ..., E_Jmax} with the convention E_0 = 1 (the scalar order-0
/// error is not stored; operations that need it use the flag).
struct CorrelationStack {
    unsigned j_max = 0;
    std::vector<DensityTable> tables; ///< tables[k] has order k+1
    bool e0_is_one = true;

    const DensityTable& order(unsigned j) const { return tables.at(j - 1); }
    DensityTable& order(unsigned j) { return tables.at(j - 1); }
    void validate() const;
};

/// f tensored with itself j times; mass is mass(f)^j.
DensityTable tensor_power(const DensityTable& f, unsigned j);

/// Wrap a pmf as an order-1 label table.
DensityTable pmf_table(const std::vector<double>& pmf);

/// Sum of |a - b| over cells. A lower bound on the true L1 distance of the
/// underlying densities (binning contracts L1); the combined truncation
/// masses bound the gap from above.
double l1_bin_distance(const DensityTable& a, const DensityTable& b);

} // namespace kaclab
