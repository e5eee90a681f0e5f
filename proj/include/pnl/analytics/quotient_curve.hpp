#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pnl/core/calculus.hpp"
#include "pnl/core/norms.hpp"

namespace pnl {

/// One entry of a difference-quotient criterion curve.
struct QuotientPoint {
    double h = 0.0;
    double norm = 0.0;
    bool valid = false;
    std::string error;
};

/// ||difference quotient||_{L^p} per step size h. A bounded curve is the
/// discrete diagnostic for the existence of the weak derivative D_k f in L^p;
/// the small-h limit estimates ||D_k f||_{L^p}.
inline std::vector<QuotientPoint> diff_quotient_curve(const Field& frame, int k, double p,
                                                      const std::vector<double>& h_list,
                                                      const std::optional<Region>& region = {}) {
    std::vector<QuotientPoint> curve;
    curve.reserve(h_list.size());
    for (double h : h_list) {
        QuotientPoint pt;
        pt.h = h;
        try {
            const DiffQuotient dq = diff_quotient(frame, k, h);
            Region reg = region.value_or(Region::all(frame.grid()));
            // intersect the request with the quotient's validity window
            for (int d = 0; d < frame.grid().dim(); ++d) {
                reg.lo[d] = std::max(reg.lo[d], dq.window.lo[d]);
                reg.hi[d] = std::min(reg.hi[d], dq.window.hi[d]);
                if (reg.lo[d] >= reg.hi[d]) throw std::invalid_argument("region outside quotient window");
            }
            pt.norm = lp_norm(dq.field, p, reg);
            pt.valid = true;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        curve.push_back(pt);
    }
    return curve;
}

/// Per-frame sup norm and the first frame index crossing the threshold.
struct BlowupScan {
    std::vector<double> sup_norm;
    std::optional<std::size_t> first_exceeding;
};

inline BlowupScan blowup_scan(const Trajectory& traj, double threshold = 1e12) {
    BlowupScan scan;
    for (std::size_t m = 0; m < traj.frames.size(); ++m) {
        double s = 0.0;
        bool finite = true;
        for (double v : traj.frames[m].values()) {
            if (!std::isfinite(v)) { finite = false; break; }
            s = std::max(s, std::abs(v));
        }
        scan.sup_norm.push_back(finite ? s : std::numeric_limits<double>::infinity());
        if (!scan.first_exceeding && (!finite || s > threshold)) scan.first_exceeding = m;
    }
    return scan;
}

}  // namespace pnl
