#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pnl/lemmas/thresholds.hpp"

namespace pnl {

/// The exponent bootstrap of the regularity theorem: the sequence q_j raised
/// by q -> min{ q (n+2)/n, 1 + q (n+2)/n (a-4)/a, (a-2)/2, q + 1 } while it
/// keeps increasing and the noise bound lh_star_q(q) > L_H holds, capped by a
/// terminal exponent q* > n/2.
struct IterationSchedule {
    int n = 0;
    double a = 0.0, nu = 0.0, kappa = 0.0, lh = 0.0;
    std::vector<double> qs;  // strictly increasing until the final entry q*
    double q_max = 0.0;      // cap of the second recursion term, +inf if a >= 2(n+2)
    double q_star = 0.0;     // terminal exponent in (n/2, min{noise cap, (a-2)/2, q_max})
    double noise_cap = 0.0;  // largest q with lh_star_q(q) > L_H
    std::size_t steps = 0;
    bool admissible = false;
};

namespace detail {

/// Largest q >= 1 with lh_star_q(q, kappa, nu) > lh. lh_star_q is strictly
/// decreasing on its positive range, so bisection applies.
inline double noise_exponent_cap(double kappa, double nu, double lh) {
    const double inf = std::numeric_limits<double>::infinity();
    if (lh <= 0.0) return nu >= 1.0 ? inf : 1.0 / (1.0 - nu);
    if (!(lh_star_q(1.0, kappa, nu) > lh)) return 1.0;
    double lo = 1.0;
    double hi = nu >= 1.0 ? 2.0 : 1.0 / (1.0 - nu);
    if (nu >= 1.0) {
        while (lh_star_q(hi, kappa, nu) > lh) hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (lh_star_q(mid, kappa, nu) > lh) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Run the recursion. `margin` in (-1, 1) shifts q* away from the midpoint of
/// the admissible interval (0 = midpoint, the deterministic default).
inline IterationSchedule iteration_schedule(int n, double a, double nu, double kappa, double lh,
                                            double margin = 0.0) {
    if (n < 1 || !(kappa > 0.0) || !(nu > 0.0) || !(nu <= 1.0) || !(lh >= 0.0))
        throw std::invalid_argument("iteration_schedule: invalid parameters");
    if (!(margin > -1.0) || !(margin < 1.0))
        throw std::invalid_argument("iteration_schedule: margin must lie in (-1,1)");

    IterationSchedule s;
    s.n = n;
    s.a = a;
    s.nu = nu;
    s.kappa = kappa;
    s.lh = lh;

    const double inf = std::numeric_limits<double>::infinity();
    s.q_max = a < 2.0 * (n + 2.0) ? n * a / (4.0 * (n + 2.0) - 2.0 * a) : inf;

    // Theorem hypotheses: a > n+2, nu > (n-2)/n, L_H < L_H*(n).
    const bool hyp = a > n + 2.0 && nu > (n - 2.0) / static_cast<double>(n) &&
                     (n < 2 || lh < lh_star_n(std::max(n, 2), kappa, nu));
    if (!hyp) return s;  // inadmissible: empty schedule

    s.noise_cap = detail::noise_exponent_cap(kappa, nu, lh);
    const double upper = std::min({s.noise_cap, (a - 2.0) / 2.0, s.q_max});
    const double lower = n / 2.0;
    if (!(upper > lower)) return s;

    s.admissible = true;
    s.q_star = 0.5 * (lower + upper) + margin * 0.5 * (upper - lower);

    double q = 1.0;
    s.qs.push_back(q);
    for (int j = 0; j < 1000; ++j) {
        const double growth = q * (n + 2.0) / n;
        const double next =
            std::min({growth, 1.0 + growth * (a - 4.0) / a, (a - 2.0) / 2.0, q + 1.0});
        if (!(next > q) || !(lh_star_q(next, kappa, nu) > lh)) break;
        s.qs.push_back(next);
        q = next;
    }
    s.qs.push_back(s.q_star);
    s.steps = s.qs.size();
    return s;
}

}  // namespace pnl
