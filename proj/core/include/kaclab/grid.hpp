#pragma once

#include <cstdint>
#include <vector>

#include "kaclab/vec.hpp"

namespace kaclab {

/// Velocity-space discretization for density tables. Two kinds:
///   uniform   per-axis bins on [-v_max, v_max]^d; a velocity outside the
///             box maps to no cell (truncation mass)
///   labels    one cell per atom of a finite velocity set (1D values);
///             used when a discrete model runs inside the continuum engine
class GridSpec {
public:
    static GridSpec uniform(int dimension, int bins_per_axis, double v_max);
    static GridSpec labels(std::vector<double> values);

    bool is_labels() const { return kind_ == Kind::labels; }
    int dimension() const { return dimension_; }
    int bins_per_axis() const { return bins_; }
    double v_max() const { return v_max_; }
    std::size_t cell_count() const { return cells_; }
    /// Volume of one cell (uniform kind; 1 for labels).
    double cell_volume() const;

    /// Flat cell index of v, or -1 if v falls outside the grid.
    std::int64_t cell_of(const Vec& v) const;

    /// Center of a cell (uniform kind) or the atom value (labels kind).
    Vec cell_center(std::size_t cell) const;

    bool operator==(const GridSpec& o) const;
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

    const std::vector<double>& label_values() const { return values_; }

private:
    enum class Kind { uniform, labels };
    GridSpec() = default;

    Kind kind_ = Kind::uniform;
    int dimension_ = 1;
    int bins_ = 2;
    double v_max_ = 1.0;
    std::size_t cells_ = 0;
    std::vector<double> values_;
};

} // namespace kaclab
