#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "pnl/core/calculus.hpp"
#include "pnl/core/field.hpp"

namespace pnl {

constexpr double kInfinityExponent = std::numeric_limits<double>::infinity();

/// Discrete L^p norm: (sum over nodes |f(x)|^p * cell volume)^(1/p), with the
/// pointwise Euclidean norm over components. p = infinity gives the max norm.
inline double lp_norm(const Field& f, double p, const std::optional<Region>& region = {}) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: exponent must be >= 1");
    const GridSpec& g = f.grid();
    const Region reg = region.value_or(Region::all(g));
    if (!reg.valid_for(g)) throw std::invalid_argument("lp_norm: region out of range");
    std::vector<long> idx;
    if (std::isinf(p)) {
        double m = 0.0;
        for (long node = 0; node < g.node_count(); ++node) {
            g.unravel(node, idx);
            if (!reg.contains(idx)) continue;
            m = std::max(m, f.node_norm(node));
        }
        return m;
    }
    double acc = 0.0;
    for (long node = 0; node < g.node_count(); ++node) {
        g.unravel(node, idx);
        if (!reg.contains(idx)) continue;
        acc += std::pow(f.node_norm(node), p) * g.node_weight(idx);
    }
    return std::pow(acc, 1.0 / p);
}

inline double l2_inner(const Field& a, const Field& b, const std::optional<Region>& region = {}) {
    const GridSpec& g = a.grid();
    const Region reg = region.value_or(Region::all(g));
    std::vector<long> idx;
    double acc = 0.0;
    for (long node = 0; node < g.node_count(); ++node) {
        g.unravel(node, idx);
        if (!reg.contains(idx)) continue;
        double s = 0.0;
        for (int c = 0; c < a.components(); ++c) s += a.at(node, c) * b.at(node, c);
        acc += s * g.node_weight(idx);
    }
    return acc;
}

/// Trapezoid weights over the trajectory's time grid.
inline std::vector<double> time_weights(const Trajectory& traj) {
    std::vector<double> w(traj.times.size(), 0.0);
    for (std::size_t m = 0; m + 1 < traj.times.size(); ++m) {
        double dt = traj.dt(m);
        w[m] += 0.5 * dt;
        w[m + 1] += 0.5 * dt;
    }
    return w;
}

/// V^{m,p} norm: sup over frames of the spatial L^m norm plus the space-time
/// L^p norm of the discrete gradient.
inline double vmp_norm(const Trajectory& traj, double m, double p) {
    if (!(m >= 1.0) || !(p >= 1.0)) throw std::invalid_argument("vmp_norm: exponents must be >= 1");
    traj.validate();
    double sup_term = 0.0;
    for (const Field& fr : traj.frames) sup_term = std::max(sup_term, lp_norm(fr, m));
    const std::vector<double> w = time_weights(traj);
    double grad_acc = 0.0;
    for (std::size_t i = 0; i < traj.frames.size(); ++i) {
        double g = lp_norm(gradient(traj.frames[i]), p);
        grad_acc += std::pow(g, p) * w[i];
    }
    return sup_term + std::pow(grad_acc, 1.0 / p);
}

/// Parabolic embedding exponent q = p (n+m)/n of V^{m,p} into L^q.
inline double embedding_exponent(double m, double p, int n) {
    if (!(m >= 1.0) || !(p >= 1.0) || n < 1)
        throw std::invalid_argument("embedding_exponent: need m,p >= 1 and n >= 1");
    return p * (static_cast<double>(n) + m) / static_cast<double>(n);
}

}  // namespace pnl
