#pragma once

#include <cmath>
#include <stdexcept>

#include "pnl/core/field.hpp"

namespace pnl {

/// Finite difference quotient h^{-1}(f(x + h e_k) - f(x)) with the result
/// restricted to the index window where the shifted node exists. Periodic
/// grids are valid everywhere; Dirichlet grids shrink along axis k.
struct DiffQuotient {
    Field field;    // same shape as the input; zero outside `window`
    Region window;  // indices where the quotient is defined
};

inline DiffQuotient diff_quotient(const Field& f, int k, double h) {
    const GridSpec& g = f.grid();
    if (k < 0 || k >= g.dim()) throw std::invalid_argument("diff_quotient: axis out of range");
    const double hk = g.spacing()[k];
    const long steps = std::llround(h / hk);
    if (steps == 0) throw std::invalid_argument("diff_quotient: zero shift");
    if (std::abs(h - steps * hk) > 1e-9 * hk)
        throw std::invalid_argument("diff_quotient: shift must be an integer multiple of the spacing");
    if (std::abs(h) >= g.extent()[k]) throw std::invalid_argument("diff_quotient: shift exceeds domain extent");

    DiffQuotient out{Field(g, f.components()), Region::all(g)};
    if (g.boundary() == Boundary::Dirichlet) {
        if (steps > 0) out.window.hi[k] -= steps;
        else out.window.lo[k] -= steps;
    }
    const double inv_h = 1.0 / (steps * hk);
    std::vector<long> idx;
    for (long node = 0; node < g.node_count(); ++node) {
        g.unravel(node, idx);
        if (!out.window.contains(idx)) continue;
        const long nb = g.shifted(node, k, steps);
        for (int c = 0; c < f.components(); ++c)
            out.field.at(node, c) = (f.at(nb, c) - f.at(node, c)) * inv_h;
    }
    return out;
}

/// Forward-difference gradient: N components in, n*N out, laid out
/// [axis*N + component]. The adjoint pairing with the backward divergence
/// makes div(grad f) equal the compact Laplacian stencil exactly on periodic
/// grids; Dirichlet grids fall back to one-sided differences on the far edge.
inline Field gradient(const Field& f) {
    const GridSpec& g = f.grid();
    const int n = g.dim(), N = f.components();
    Field out(g, n * N);
    std::vector<long> idx;
    for (long node = 0; node < g.node_count(); ++node) {
        g.unravel(node, idx);
        for (int k = 0; k < n; ++k) {
            const double inv_h = 1.0 / g.spacing()[k];
            long a = node, b;
            if (g.boundary() == Boundary::Periodic || idx[k] + 1 < g.nodes()[k]) {
                b = g.shifted(node, k, +1);
            } else {  // one-sided at the Dirichlet far edge
                a = g.shifted(node, k, -1);
                b = node;
            }
            for (int c = 0; c < N; ++c)
                out.at(node, k * N + c) = (f.at(b, c) - f.at(a, c)) * inv_h;
        }
    }
    return out;
}

/// Backward-difference divergence: n*N components in, N out.
inline Field divergence(const Field& gfield) {
    const GridSpec& g = gfield.grid();
    const int n = g.dim();
    if (gfield.components() % n != 0)
        throw std::invalid_argument("divergence: component count must be a multiple of the dimension");
    const int N = gfield.components() / n;
    Field out(g, N);
    std::vector<long> idx;
    for (long node = 0; node < g.node_count(); ++node) {
        g.unravel(node, idx);
        for (int k = 0; k < n; ++k) {
            const double inv_h = 1.0 / g.spacing()[k];
            long a, b = node;
            if (g.boundary() == Boundary::Periodic || idx[k] > 0) {
                a = g.shifted(node, k, -1);
            } else {  // one-sided at the Dirichlet near edge
                a = node;
                b = g.shifted(node, k, +1);
            }
            for (int c = 0; c < N; ++c)
                out.at(node, c) += (gfield.at(b, k * N + c) - gfield.at(a, k * N + c)) * inv_h;
        }
    }
    return out;
}

/// Compact three-point Laplacian per axis; one-sided second difference on
/// Dirichlet boundary nodes. Identical to divergence(gradient(f)) on
/// periodic grids.
inline Field laplacian(const Field& f) {
    const GridSpec& g = f.grid();
    const int N = f.components();
    Field out(g, N);
    std::vector<long> idx;
    for (long node = 0; node < g.node_count(); ++node) {
        g.unravel(node, idx);
        for (int k = 0; k < g.dim(); ++k) {
            const double inv_h2 = 1.0 / (g.spacing()[k] * g.spacing()[k]);
            long c0 = node;
            if (g.boundary() == Boundary::Dirichlet) {
                if (idx[k] == 0) c0 = g.shifted(node, k, +1);
                else if (idx[k] == g.nodes()[k] - 1) c0 = g.shifted(node, k, -1);
            }
            const long lo = g.shifted(c0, k, -1), hi = g.shifted(c0, k, +1);
            for (int c = 0; c < N; ++c)
                out.at(node, c) += (f.at(hi, c) - 2.0 * f.at(c0, c) + f.at(lo, c)) * inv_h2;
        }
    }
    return out;
}

}  // namespace pnl
