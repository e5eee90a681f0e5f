#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pnl/ensemble/weights.hpp"
#include "pnl/sde/stepper.hpp"

namespace pnl {

/// Per-path monitor selection for run_ensemble.
struct Observables {
    bool second_moment = true;
    bool energy_curve = false;  // ||u(t)||_{L^2} at snapshot times
    bool g0_curve = false;      // G_0(u,0)(t) at snapshot times
    double g0_a = 0.0;          // integrability exponent for G_0 (0 = n+3)
};

struct PathRecord {
    std::uint64_t path_index = 0;
    std::optional<long> blow_up;
    long solver_iterations = 0;
    std::vector<double> energy_curve;
    std::vector<double> G0_curve;
};

struct EnsembleResult {
    long M = 0;          // requested path count
    long completed = 0;  // paths that did not blow up
    Trajectory mean;
    std::optional<Trajectory> second_moment;
    std::vector<PathRecord> per_path;

    /// Pointwise variance E[u^2] - E[u]^2 at a snapshot frame.
    Field variance_frame(std::size_t m) const {
        if (!second_moment) throw std::logic_error("EnsembleResult: second moment not recorded");
        Field v = second_moment->frames[m];
        const Field& mu = mean.frames[m];
        for (std::size_t i = 0; i < v.values().size(); ++i) {
            const double var = v.values()[i] - mu.values()[i] * mu.values()[i];
            v.values()[i] = var;
        }
        return v;
    }

    /// Standard error of the mean, sqrt(max(var,0)/completed), per node.
    Field standard_error_frame(std::size_t m) const {
        Field v = variance_frame(m);
        for (double& x : v.values()) x = std::sqrt(std::max(x, 0.0) / std::max<long>(completed, 1));
        return v;
    }
};

inline int effective_nprime(const SimConfig& cfg) {
    return cfg.scheme == Scheme::StratonovichCorrected ? cfg.grid.dim() : cfg.noise.nprime();
}

/// Monte Carlo over independent Brownian paths (path_index = 0..M-1).
///
/// Accumulation is deterministic for every worker count: chunks of paths are
/// grouped by a fixed stride, each group is reduced sequentially in index
/// order, and the group partials are combined in a fixed order at the end.
inline EnsembleResult run_ensemble(const SimConfig& cfg, long M, std::uint64_t master_seed,
                                   const Observables& obs = {}, int workers = 0) {
    if (M < 1) throw std::invalid_argument("run_ensemble: need M >= 1");
    cfg.validate();
    const std::vector<double> timegrid = uniform_timegrid(cfg.T, cfg.steps);
    const int nprime = effective_nprime(cfg);
    const int n = cfg.grid.dim();
    const double g0_a = obs.g0_a > 0.0 ? obs.g0_a : n + 3.0;

    // Reference snapshot times (identical for every path).
    std::vector<double> snap_times{0.0};
    for (long m = 0; m < cfg.steps; ++m)
        if ((m + 1) % cfg.snapshot_every == 0 || m + 1 == cfg.steps)
            snap_times.push_back(timegrid[m + 1]);
    const std::size_t frames = snap_times.size();
    const std::size_t per_frame = cfg.u0.values().size();

    constexpr long kChunk = 16;
    constexpr int kGroups = 8;
    const long nchunks = (M + kChunk - 1) / kChunk;

    struct GroupAcc {
        std::vector<double> sum, sumsq;
        long completed = 0;
    };
    std::vector<GroupAcc> groups(kGroups);
    for (auto& g : groups) {
        g.sum.assign(frames * per_frame, 0.0);
        if (obs.second_moment) g.sumsq.assign(frames * per_frame, 0.0);
    }

    EnsembleResult result;
    result.M = M;
    result.per_path.resize(M);

    std::atomic<int> next_group{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run_group = [&](int g) {
        GroupAcc& acc = groups[g];
        for (long chunk = g; chunk < nchunks; chunk += kGroups) {
            const long lo = chunk * kChunk, hi = std::min(M, lo + kChunk);
            for (long pidx = lo; pidx < hi; ++pidx) {
                const BrownianPath path =
                    sample_brownian(master_seed, static_cast<std::uint64_t>(pidx), nprime, timegrid);
                const SimResult sim = simulate(cfg, path);
                PathRecord& rec = result.per_path[pidx];
                rec.path_index = static_cast<std::uint64_t>(pidx);
                rec.blow_up = sim.blowup_step;
                rec.solver_iterations = sim.solver_iterations;
                if (sim.blowup_step) continue;  // recorded, excluded from moments
                if (sim.trajectory.frames.size() != frames)
                    throw std::logic_error("run_ensemble: snapshot cadence mismatch");
                for (std::size_t m = 0; m < frames; ++m) {
                    const auto& vals = sim.trajectory.frames[m].values();
                    double* s = &acc.sum[m * per_frame];
                    for (std::size_t i = 0; i < per_frame; ++i) s[i] += vals[i];
                    if (obs.second_moment) {
                        double* s2 = &acc.sumsq[m * per_frame];
                        for (std::size_t i = 0; i < per_frame; ++i) s2[i] += vals[i] * vals[i];
                    }
                    if (obs.energy_curve)
                        rec.energy_curve.push_back(lp_norm(sim.trajectory.frames[m], 2.0));
                    if (obs.g0_curve)
                        rec.G0_curve.push_back(weight_G0(sim.trajectory.frames[m], nullptr, n, g0_a));
                }
                ++acc.completed;
            }
        }
    };

    auto worker_loop = [&]() {
        try {
            for (int g = next_group.fetch_add(1); g < kGroups; g = next_group.fetch_add(1))
                run_group(g);
        } catch (...) {
            std::lock_guard<std::mutex> lk(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    int nthreads = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min({nthreads, kGroups, static_cast<int>(nchunks)}));
    if (nthreads == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker_loop);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Fixed-order combination of the group partials.
    for (int g = 0; g < kGroups; ++g) result.completed += groups[g].completed;
    if (result.completed == 0) throw std::runtime_error("run_ensemble: every path blew up");
    std::vector<double> sum(frames * per_frame, 0.0), sumsq;
    if (obs.second_moment) sumsq.assign(frames * per_frame, 0.0);
    for (int g = 0; g < kGroups; ++g) {
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += groups[g].sum[i];
        if (obs.second_moment)
            for (std::size_t i = 0; i < sumsq.size(); ++i) sumsq[i] += groups[g].sumsq[i];
    }

    const double inv = 1.0 / static_cast<double>(result.completed);
    result.mean.times = snap_times;
    if (obs.second_moment) result.second_moment.emplace().times = snap_times;
    for (std::size_t m = 0; m < frames; ++m) {
        Field fmean(cfg.grid, cfg.u0.components());
        for (std::size_t i = 0; i < per_frame; ++i) fmean.values()[i] = sum[m * per_frame + i] * inv;
        result.mean.frames.push_back(std::move(fmean));
        if (obs.second_moment) {
            Field f2(cfg.grid, cfg.u0.components());
            for (std::size_t i = 0; i < per_frame; ++i)
                f2.values()[i] = sumsq[m * per_frame + i] * inv;
            result.second_moment->frames.push_back(std::move(f2));
        }
    }
    return result;
}

}  // namespace pnl
