#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pnl/core/rng.hpp"

namespace pnl {

/// Seeded n'-dimensional Brownian increment table on a time grid. Increments
/// are a pure function of (master_seed, path_index, level, step, dim), so a
/// path regenerates identically regardless of execution order, and bisection
/// refinement keeps the coarse increments as pairwise sums of the fine ones.
struct BrownianPath {
    int nprime = 1;
    std::vector<double> times;       // M+1 entries, strictly increasing from 0
    std::vector<double> increments;  // M * nprime, [step*nprime + dim]
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    int level = 0;

    std::size_t steps() const { return times.size() - 1; }
    double dt(std::size_t m) const { return times[m + 1] - times[m]; }
    double increment(std::size_t m, int d) const { return increments[m * nprime + d]; }

    /// B at time index m (sum of the first m increments).
    std::vector<double> value_at(std::size_t m) const {
        std::vector<double> b(nprime, 0.0);
        for (std::size_t s = 0; s < m; ++s)
            for (int d = 0; d < nprime; ++d) b[d] += increments[s * nprime + d];
        return b;
    }
};

inline BrownianPath sample_brownian(std::uint64_t master_seed, std::uint64_t path_index,
                                    int nprime, const std::vector<double>& timegrid) {
    if (timegrid.size() < 2) throw std::invalid_argument("sample_brownian: need at least one step");
    for (std::size_t m = 1; m < timegrid.size(); ++m)
        if (!(timegrid[m] > timegrid[m - 1]))
            throw std::invalid_argument("sample_brownian: timegrid must be strictly increasing");
    BrownianPath p;
    p.nprime = nprime;
    p.times = timegrid;
    p.master_seed = master_seed;
    p.path_index = path_index;
    p.increments.resize(p.steps() * nprime);
    for (std::size_t m = 0; m < p.steps(); ++m) {
        const double sdt = std::sqrt(p.dt(m));
        for (int d = 0; d < nprime; ++d) {
            const std::uint64_t k = rng::key(master_seed, path_index, m, static_cast<std::uint64_t>(d));
            p.increments[m * nprime + d] = sdt * rng::gaussian(k);
        }
    }
    return p;
}

inline std::vector<double> uniform_timegrid(double T, long steps) {
    std::vector<double> t(steps + 1);
    for (long m = 0; m <= steps; ++m) t[m] = T * static_cast<double>(m) / steps;
    t.back() = T;
    return t;
}

/// Brownian-bridge midpoint refinement: each coarse increment splits into two
/// fine ones that sum back exactly to it. The bridge draws are keyed by the
/// refinement level, so repeated bisection is deterministic.
inline BrownianPath bisect(const BrownianPath& coarse) {
    BrownianPath f;
    f.nprime = coarse.nprime;
    f.master_seed = coarse.master_seed;
    f.path_index = coarse.path_index;
    f.level = coarse.level + 1;
    const std::size_t M = coarse.steps();
    f.times.resize(2 * M + 1);
    f.increments.resize(2 * M * coarse.nprime);
    for (std::size_t m = 0; m < M; ++m) {
        const double t0 = coarse.times[m], t1 = coarse.times[m + 1];
        f.times[2 * m] = t0;
        f.times[2 * m + 1] = 0.5 * (t0 + t1);
        const double half_sd = 0.5 * std::sqrt(t1 - t0);
        for (int d = 0; d < coarse.nprime; ++d) {
            const std::uint64_t tag = (static_cast<std::uint64_t>(f.level) << 48) | m;
            const double xi = rng::gaussian(
                rng::key(f.master_seed, f.path_index, tag, static_cast<std::uint64_t>(d)));
            const double whole = coarse.increment(m, d);
            const double left = 0.5 * whole + half_sd * xi;
            f.increments[(2 * m) * f.nprime + d] = left;
            f.increments[(2 * m + 1) * f.nprime + d] = whole - left;
        }
    }
    f.times.back() = coarse.times.back();
    return f;
}

}  // namespace pnl
