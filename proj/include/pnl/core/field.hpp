#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pnl/core/grid.hpp"

namespace pnl {

/// R^N-valued grid function. Values are stored node-major: values[node*N + c].
class Field {
public:
    Field(GridSpec grid, int components)
        : grid_(std::move(grid)), components_(components),
          values_(static_cast<std::size_t>(grid_.node_count()) * components, 0.0) {
        if (components < 1) throw std::invalid_argument("Field: component count must be >= 1");
    }

    Field(GridSpec grid, int components, std::vector<double> values)
        : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
        if (components < 1) throw std::invalid_argument("Field: component count must be >= 1");
        if (values_.size() != static_cast<std::size_t>(grid_.node_count()) * components_)
            throw std::invalid_argument("Field: value buffer size mismatch");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("Field: non-finite value");
    }

    /// Sample a closed-form function of the node coordinates.
    static Field from_function(const GridSpec& grid, int components,
                               const std::function<void(const std::vector<double>&, double*)>& f) {
        Field out(grid, components);
        std::vector<long> idx;
        std::vector<double> x;
        for (long p = 0; p < grid.node_count(); ++p) {
            grid.unravel(p, idx);
            grid.coords(idx, x);
            f(x, &out.values_[static_cast<std::size_t>(p) * components]);
        }
        return out;
    }

    static Field scalar_from_function(const GridSpec& grid,
                                      const std::function<double(const std::vector<double>&)>& f) {
        return from_function(grid, 1, [&](const std::vector<double>& x, double* v) { *v = f(x); });
    }

    const GridSpec& grid() const { return grid_; }
    int components() const { return components_; }
    double& at(long node, int c) { return values_[static_cast<std::size_t>(node) * components_ + c]; }
    double at(long node, int c) const { return values_[static_cast<std::size_t>(node) * components_ + c]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// Euclidean norm over components at one node.
    double node_norm(long node) const {
        double s = 0.0;
        const double* v = &values_[static_cast<std::size_t>(node) * components_];
        for (int c = 0; c < components_; ++c) s += v[c] * v[c];
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Field& operator+=(const Field& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    Field& operator*=(double c) {
        for (double& v : values_) v *= c;
        return *this;
    }

private:
    GridSpec grid_;
    int components_;
    std::vector<double> values_;
};

inline Field operator-(Field a, const Field& b) { a -= b; return a; }
inline Field operator+(Field a, const Field& b) { a += b; return a; }
inline Field operator*(double c, Field a) { a *= c; return a; }

/// Time-indexed sequence of fields sharing one grid: the discrete trajectory.
struct Trajectory {
    std::vector<double> times;   // strictly increasing, times.front() == 0
    std::vector<Field> frames;   // one Field per time

    void validate() const {
        if (frames.size() != times.size() || times.size() < 2)
            throw std::invalid_argument("Trajectory: need matching times/frames, at least two");
        for (std::size_t m = 1; m < times.size(); ++m) {
            if (!(times[m] > times[m - 1]))
                throw std::invalid_argument("Trajectory: times must be strictly increasing");
            if (!frames[m].grid().same_shape(frames[0].grid()) ||
                frames[m].components() != frames[0].components())
                throw std::invalid_argument("Trajectory: frames must share grid and components");
        }
    }

    std::size_t frame_count() const { return frames.size(); }
    double horizon() const { return times.back(); }
    double dt(std::size_t m) const { return times[m + 1] - times[m]; }
};

}  // namespace pnl
