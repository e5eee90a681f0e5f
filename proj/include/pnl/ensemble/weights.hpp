#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pnl/core/norms.hpp"

namespace pnl {

/// G_0(u,f)(s) = 1 + ||u(s)||_{L^{2(n+2)/n}}^{2(n+2)/n} + ||f(s)||_{L^a}^a.
inline double weight_G0(const Field& frame, const Field* f_frame, int n, double a) {
    if (!(a > n + 2.0)) throw std::invalid_argument("weight_G0: requires a > n + 2");
    const double p = 2.0 * (n + 2.0) / n;
    double g = 1.0 + std::pow(lp_norm(frame, p), p);
    if (f_frame) g += std::pow(lp_norm(*f_frame, a), a);
    return g;
}

/// G'(u,f)(s) = G_0(u,f)(s) + ||Du(s)||_{L^2}^2; always >= G_0.
inline double weight_Gprime(const Field& frame, const Field& grad_frame, const Field* f_frame,
                            int n, double a) {
    const double g2 = lp_norm(grad_frame, 2.0);
    return weight_G0(frame, f_frame, n, a) + g2 * g2;
}

/// G''(u,f)(s) = (2q/c'') G_p(s) + 1 + ||Du||_{L^{2p(n+2)/n}}^{2p(n+2)/n}
///             + ||u||_{L^{2p((n+2)/n)^2}}^{2p((n+2)/n)^2} + ||f||_{L^a}^a.
inline double weight_Gsecond(const Field& frame, const Field& grad_frame, const Field* f_frame,
                             double G_p_value, double p, double q, int n, double a,
                             double c_second) {
    if (!(p >= 1.0) || !(c_second > 0.0))
        throw std::invalid_argument("weight_Gsecond: need p >= 1 and c'' > 0");
    const double growth = (n + 2.0) / n;
    const double pg = 2.0 * p * growth;
    const double pu = 2.0 * p * growth * growth;
    double g = 2.0 * q / c_second * G_p_value + 1.0 + std::pow(lp_norm(grad_frame, pg), pg) +
               std::pow(lp_norm(frame, pu), pu);
    if (f_frame) g += std::pow(lp_norm(*f_frame, a), a);
    return g;
}

/// Damping weight Y(t) = exp(-int_0^t c G ds), computed by trapezoid
/// quadrature of the sampled G curve. Y(0) = 1 and Y is non-increasing for
/// nonnegative c G.
struct WeightCurve {
    double c = 0.0;
    std::vector<double> times;
    std::vector<double> G;
    std::vector<double> Y;

    static WeightCurve from_samples(double c, std::vector<double> times, std::vector<double> G) {
        if (times.size() != G.size() || times.empty())
            throw std::invalid_argument("WeightCurve: times/G size mismatch");
        WeightCurve w;
        w.c = c;
        w.times = std::move(times);
        w.G = std::move(G);
        w.Y.resize(w.times.size());
        double integral = 0.0;
        w.Y[0] = 1.0;
        for (std::size_t m = 1; m < w.times.size(); ++m) {
            integral += 0.5 * (w.times[m] - w.times[m - 1]) * (w.G[m] + w.G[m - 1]);
            w.Y[m] = std::exp(-c * integral);
        }
        return w;
    }
};

/// Weighted energy pair of a trajectory over a region:
///   sup_t Y(t) ||u(t)||^2_{L^2}   and   int_0^T Y(t) ||Du(t)||^2_{L^2} dt.
/// The operand is the caller's choice (u, a difference quotient, a power).
struct WeightedEnergy {
    double sup_term = 0.0;
    double integral_term = 0.0;
};

inline WeightedEnergy weighted_energy(const Trajectory& traj, const WeightCurve& weights,
                                      const std::optional<Region>& region = {}) {
    traj.validate();
    if (weights.times.size() != traj.times.size())
        throw std::invalid_argument("weighted_energy: weight curve must share the time grid");
    if (region && !region->valid_for(traj.frames[0].grid()))
        throw std::invalid_argument("weighted_energy: region out of range");
    WeightedEnergy e;
    const std::vector<double> w = time_weights(traj);
    for (std::size_t m = 0; m < traj.frames.size(); ++m) {
        const double un = lp_norm(traj.frames[m], 2.0, region);
        e.sup_term = std::max(e.sup_term, weights.Y[m] * un * un);
        const double gn = lp_norm(gradient(traj.frames[m]), 2.0, region);
        e.integral_term += w[m] * weights.Y[m] * gn * gn;
    }
    return e;
}

}  // namespace pnl
