#include "kaclab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab {

GridSpec GridSpec::uniform(int dimension, int bins_per_axis, double v_max) {
    if (dimension != 1 && dimension != 3)
        throw std::invalid_argument("GridSpec: dimension must be 1 or 3");
    if (bins_per_axis < 2) throw std::invalid_argument("GridSpec: need at least 2 bins per axis");
    if (!(v_max > 0.0)) throw std::invalid_argument("GridSpec: v_max must be positive");
    GridSpec g;
    g.kind_ = Kind::uniform;
    g.dimension_ = dimension;
    g.bins_ = bins_per_axis;
    g.v_max_ = v_max;
    g.cells_ = 1;
    for (int i = 0; i < dimension; ++i) g.cells_ *= static_cast<std::size_t>(bins_per_axis);
    return g;
}

GridSpec GridSpec::labels(std::vector<double> values) {
    if (values.size() < 2) throw std::invalid_argument("GridSpec: need at least 2 labels");
    GridSpec g;
    g.kind_ = Kind::labels;
    g.dimension_ = 1;
    g.cells_ = values.size();
    g.values_ = std::move(values);
    return g;
}

double GridSpec::cell_volume() const {
    if (kind_ == Kind::labels) return 1.0;
    const double h = 2.0 * v_max_ / bins_;
    return std::pow(h, dimension_);
}

std::int64_t GridSpec::cell_of(const Vec& v) const {
    if (kind_ == Kind::labels) {
        // Nearest atom; the engine only ever produces exact atom values.
        std::size_t best = 0;
        double dist = std::abs(v[0] - values_[0]);
        for (std::size_t a = 1; a < values_.size(); ++a) {
            const double d = std::abs(v[0] - values_[a]);
            if (d < dist) { dist = d; best = a; }
        }
        return static_cast<std::int64_t>(best);
    }
    const double h = 2.0 * v_max_ / bins_;
    std::int64_t idx = 0;
    for (int i = 0; i < dimension_; ++i) {
        const double x = v[i] + v_max_;
        if (x < 0.0 || v[i] >= v_max_) return -1;
        auto b = static_cast<std::int64_t>(x / h);
        if (b >= bins_) b = bins_ - 1; // roundoff at the upper edge
        idx = idx * bins_ + b;
    }
    return idx;
}

Vec GridSpec::cell_center(std::size_t cell) const {
    Vec v;
    if (kind_ == Kind::labels) {
        v[0] = values_.at(cell);
        return v;
    }
    const double h = 2.0 * v_max_ / bins_;
    auto rest = static_cast<std::int64_t>(cell);
    for (int i = dimension_ - 1; i >= 0; --i) {
        const std::int64_t b = rest % bins_;
        rest /= bins_;
        v[i] = -v_max_ + (static_cast<double>(b) + 0.5) * h;
    }
    return v;
}

bool GridSpec::operator==(const GridSpec& o) const {
    if (kind_ != o.kind_) return false;
    if (kind_ == Kind::labels) return values_ == o.values_;
    return dimension_ == o.dimension_ && bins_ == o.bins_ && v_max_ == o.v_max_;
}

} // namespace kaclab
