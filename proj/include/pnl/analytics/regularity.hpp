#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pnl/core/norms.hpp"
#include "pnl/core/rng.hpp"
#include "pnl/lemmas/thresholds.hpp"

namespace pnl {

/// Log-log least squares over per-bin sup statistics.
struct ExponentFit {
    double exponent = 0.0;   // fitted slope, clamped to [0,1]
    double raw_slope = 0.0;  // unclamped slope
    double constant = 0.0;   // exp(intercept)
    double r_squared = 0.0;
    long bins_used = 0;
    bool degenerate = false;
};

namespace detail {

inline ExponentFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    ExponentFit fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (ys[i] > 0.0 && xs[i] > 0.0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    fit.bins_used = static_cast<long>(lx.size());
    if (lx.size() < 2) {
        fit.degenerate = true;
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) {
        fit.degenerate = true;
        return fit;
    }
    fit.raw_slope = sxy / sxx;
    fit.exponent = std::clamp(fit.raw_slope, 0.0, 1.0);
    fit.constant = std::exp(my - fit.raw_slope * mx);
    fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace detail

/// Estimate the spatial Hoelder exponent of a frame: sample node pairs in
/// dyadic distance bins, take the sup of |f(x)-f(y)| per bin and fit the
/// log-log slope. Grid data cannot certify more than Lipschitz, so the
/// estimate is clamped to [0,1]. A constant frame is returned as the
/// degenerate convention (gamma = 1, C = 0).
inline ExponentFit spatial_hoelder_estimate(const Field& frame, long pair_budget,
                                            std::uint64_t seed,
                                            const std::optional<Region>& region = {}) {
    if (pair_budget < 1000)
        throw std::invalid_argument("spatial_hoelder_estimate: pair budget too small");
    const GridSpec& g = frame.grid();
    const Region reg = region.value_or(Region::all(g));
    if (!reg.valid_for(g)) throw std::invalid_argument("spatial_hoelder_estimate: bad region");

    double diam2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
        const double span = (reg.hi[d] - 1 - reg.lo[d]) * g.spacing()[d];
        diam2 += span * span;
    }
    const double diam = std::sqrt(diam2);
    const double h_min = g.spacing_min();

    // dyadic bins from ~2h up to diam/2
    std::vector<double> bin_d;
    for (double d = diam / 2.0; d >= 2.0 * h_min; d /= 2.0) bin_d.push_back(d);
    std::reverse(bin_d.begin(), bin_d.end());
    if (bin_d.size() < 2) throw std::invalid_argument("spatial_hoelder_estimate: grid too coarse");

    const long per_bin = pair_budget / static_cast<long>(bin_d.size());
    rng::Stream rs(seed);
    std::vector<double> sup(bin_d.size(), 0.0), avg_d(bin_d.size(), 0.0);
    std::vector<long> cnt(bin_d.size(), 0);
    std::vector<long> ia(g.dim()), ib(g.dim());
    const double two_pi = 6.283185307179586476925286766559;

    for (std::size_t b = 0; b < bin_d.size(); ++b) {
        for (long s = 0; s < per_bin; ++s) {
            for (int d = 0; d < g.dim(); ++d)
                ia[d] = reg.lo[d] + rs.uniform_index(reg.hi[d] - reg.lo[d]);
            // random direction, distance inside the bin
            const double dist = bin_d[b] * rs.uniform(0.75, 1.25);
            double norm = 0.0;
            std::vector<double> dir(g.dim());
            if (g.dim() == 1) {
                dir[0] = rs.uniform() < 0.5 ? -1.0 : 1.0;
                norm = 1.0;
            } else if (g.dim() == 2) {
                const double th = two_pi * rs.uniform();
                dir[0] = std::cos(th);
                dir[1] = std::sin(th);
                norm = 1.0;
            } else {
                for (int d = 0; d < g.dim(); ++d) {
                    dir[d] = rs.gaussian();
                    norm += dir[d] * dir[d];
                }
                norm = std::sqrt(std::max(norm, 1e-300));
            }
            bool ok = true;
            double actual2 = 0.0;
            for (int d = 0; d < g.dim(); ++d) {
                const long off = std::lround(dist * dir[d] / norm / g.spacing()[d]);
                ib[d] = ia[d] + off;
                if (ib[d] < reg.lo[d] || ib[d] >= reg.hi[d]) {
                    ok = false;
                    break;
                }
                actual2 += off * off * g.spacing()[d] * g.spacing()[d];
            }
            if (!ok || actual2 == 0.0) continue;
            const long pa = g.index(ia), pb = g.index(ib);
            double diff2 = 0.0;
            for (int c = 0; c < frame.components(); ++c) {
                const double r = frame.at(pa, c) - frame.at(pb, c);
                diff2 += r * r;
            }
            sup[b] = std::max(sup[b], std::sqrt(diff2));
            avg_d[b] += std::sqrt(actual2);
            ++cnt[b];
        }
        if (cnt[b] > 0) avg_d[b] /= cnt[b];
    }

    double scale = 0.0;
    for (long p = 0; p < g.node_count(); ++p) scale = std::max(scale, frame.node_norm(p));
    double max_sup = 0.0;
    for (double s : sup) max_sup = std::max(max_sup, s);
    if (max_sup <= 1e-14 * std::max(scale, 1.0)) {
        ExponentFit fit;
        fit.degenerate = true;
        fit.exponent = 1.0;  // constant-field convention
        fit.constant = 0.0;
        return fit;
    }
    return detail::fit_loglog(avg_d, sup);
}

/// Temporal L^2 modulus: ||u(t) - u(s)||_{L^2} over dyadic frame lags, sup
/// per lag, log-log fit. Needs at least 8 frames.
inline ExponentFit temporal_l2_modulus(const Trajectory& traj) {
    traj.validate();
    if (traj.frame_count() < 8) throw std::invalid_argument("temporal_l2_modulus: need >= 8 frames");
    const std::size_t F = traj.frame_count();
    std::vector<double> lag_dt, lag_sup;
    double scale = 0.0;
    for (const Field& f : traj.frames) scale = std::max(scale, lp_norm(f, kInfinityExponent));
    for (std::size_t lag = 1; lag <= (F - 1) / 2; lag *= 2) {
        double sup = 0.0, dt_avg = 0.0;
        long cnt = 0;
        for (std::size_t m = 0; m + lag < F; ++m) {
            const double d = lp_norm(traj.frames[m + lag] - traj.frames[m], 2.0);
            sup = std::max(sup, d);
            dt_avg += traj.times[m + lag] - traj.times[m];
            ++cnt;
        }
        lag_dt.push_back(dt_avg / cnt);
        lag_sup.push_back(sup);
    }
    double max_sup = 0.0;
    for (double s : lag_sup) max_sup = std::max(max_sup, s);
    if (max_sup <= 1e-14 * std::max(scale, 1.0)) {
        ExponentFit fit;
        fit.degenerate = true;
        return fit;
    }
    return detail::fit_loglog(lag_dt, lag_sup);
}

/// sup_t ||Du(t)||_{L^p} for each requested p.
inline std::vector<double> integrability_profile(const Trajectory& traj,
                                                 const std::vector<double>& p_list,
                                                 const std::optional<Region>& region = {}) {
    traj.validate();
    std::vector<double> out(p_list.size(), 0.0);
    for (const Field& f : traj.frames) {
        const Field g = gradient(f);
        for (std::size_t i = 0; i < p_list.size(); ++i)
            out[i] = std::max(out[i], lp_norm(g, p_list[i], region));
    }
    return out;
}

/// Regularity measurements of a trajectory, combined through the Hoelder
/// exponent formula (single source of truth for gamma_combined).
struct RegularityReport {
    double gamma_space = 0.0;
    double beta_time = 0.0;
    double alpha_int = 0.0;  // largest p with sup_t ||Du||_{L^p} <= cap, as p - n
    double gamma_combined = 0.0;
    ExponentFit space_fit, time_fit;
    std::vector<double> profile_p, profile_value;
    bool degenerate = false;
};

struct RegularityParams {
    long pair_budget = 200000;
    std::uint64_t seed = 17;
    double interior_margin = 0.10;  // per-axis node fraction excluded
    double gradient_cap = 0.0;      // 0 = 10 * profile value at p = 2
    std::vector<double> p_list;     // defaults to n+k for k in 0..6
};

inline RegularityReport regularity_report(const Trajectory& traj, const RegularityParams& params) {
    traj.validate();
    const GridSpec& g = traj.frames[0].grid();
    const int n = g.dim();
    RegularityReport rep;
    const Region interior = Region::interior(g, params.interior_margin);

    rep.space_fit = spatial_hoelder_estimate(traj.frames.back(), params.pair_budget, params.seed,
                                             interior);
    rep.gamma_space = rep.space_fit.exponent;
    if (traj.frame_count() >= 8) {
        rep.time_fit = temporal_l2_modulus(traj);
        rep.beta_time = rep.time_fit.degenerate ? 0.0 : rep.time_fit.exponent;
    }

    rep.profile_p = params.p_list;
    if (rep.profile_p.empty())
        for (int k = 0; k <= 6; ++k) rep.profile_p.push_back(n + static_cast<double>(k));
    rep.profile_value = integrability_profile(traj, rep.profile_p, interior);

    double cap = params.gradient_cap;
    if (cap <= 0.0) {
        const std::vector<double> base = integrability_profile(traj, {2.0}, interior);
        cap = 10.0 * std::max(base[0], 1e-12);
    }
    double best_p = 0.0;
    for (std::size_t i = 0; i < rep.profile_p.size(); ++i)
        if (rep.profile_value[i] <= cap) best_p = std::max(best_p, rep.profile_p[i]);
    rep.alpha_int = std::max(0.0, best_p - n);

    rep.degenerate = rep.space_fit.degenerate || (traj.frame_count() >= 8 && rep.time_fit.degenerate);
    rep.gamma_combined = hoelder_combine(rep.alpha_int, rep.beta_time, n);
    return rep;
}

}  // namespace pnl
