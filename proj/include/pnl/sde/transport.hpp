#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pnl/core/field.hpp"
#include "pnl/sde/brownian.hpp"

namespace pnl {

/// Closed-form initial datum used where the shift x + B_t must be evaluated
/// analytically rather than by grid interpolation.
using InitialDatum = std::function<void(const std::vector<double>& x, double* values)>;

/// Exact weak solution u(x,t) = u0(x + B_t) of the Stratonovich transport
/// system du = Du o dB on the torus. n' must equal the grid dimension.
inline Field exact_transport(const InitialDatum& u0, int components, const GridSpec& grid,
                             const BrownianPath& path, std::size_t t_index) {
    if (grid.boundary() != Boundary::Periodic)
        throw std::invalid_argument("exact_transport: supported on periodic grids only");
    if (path.nprime != grid.dim())
        throw std::invalid_argument("exact_transport: Brownian dimension must match the grid");
    if (t_index >= path.times.size())
        throw std::invalid_argument("exact_transport: time index out of range");

    const std::vector<double> B = path.value_at(t_index);
    return Field::from_function(grid, components, [&](const std::vector<double>& x, double* v) {
        std::vector<double> y(x.size());
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double L = grid.extent()[d];
            y[d] = std::fmod(x[d] + B[d], L);
            if (y[d] < 0.0) y[d] += L;
        }
        u0(y, v);
    });
}

}  // namespace pnl
