#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pnl/lemmas/truncation.hpp"

namespace pnl {

/// Parabolic dispersion threshold: lambda0/lambda1 > 1 - 2/n.
inline bool dispersion_ok_parabolic(double lambda0, double lambda1, int n) {
    if (!(lambda0 > 0.0) || !(lambda1 >= lambda0) || n < 1)
        throw std::invalid_argument("dispersion_ok_parabolic: need 0 < lambda0 <= lambda1, n >= 1");
    return lambda0 / lambda1 > 1.0 - 2.0 / static_cast<double>(n);
}

/// Elliptic dispersion threshold:
/// ((l1 - l0)/(l1 + l0)) * sqrt(1 + (n-2)^2/(n-1)) < 1.
inline bool dispersion_ok_elliptic(double lambda0, double lambda1, int n) {
    if (!(lambda0 > 0.0) || !(lambda1 >= lambda0) || n < 2)
        throw std::invalid_argument("dispersion_ok_elliptic: need 0 < lambda0 <= lambda1, n >= 2");
    const double ratio = (lambda1 - lambda0) / (lambda1 + lambda0);
    const double amp = std::sqrt(1.0 + (n - 2.0) * (n - 2.0) / (n - 1.0));
    return ratio * amp < 1.0;
}

/// Largest admissible noise Lipschitz constant at exponent q:
/// L_H^2 < (1/(kappa (q - 1/2))) (sqrt(mu(q)) - sqrt(1 - nu^2)).
/// Returns 0 when the bracket is nonpositive (no admissible noise).
inline double lh_star_q(double q, double kappa, double nu) {
    if (!(q >= 1.0) || !(kappa > 0.0) || !(nu > 0.0) || !(nu <= 1.0))
        throw std::invalid_argument("lh_star_q: need q >= 1, kappa > 0, nu in (0,1]");
    const double bracket = std::sqrt(mu_trunc(q)) - std::sqrt(std::max(0.0, 1.0 - nu * nu));
    if (!(bracket > 0.0)) return 0.0;
    return std::sqrt(bracket / (kappa * (q - 0.5)));
}

/// Dimension form of the same bound; equals lh_star_q(n/2, kappa, nu).
inline double lh_star_n(int n, double kappa, double nu) {
    if (n < 2) throw std::invalid_argument("lh_star_n: need n >= 2");
    const double frac = (n - 2.0) / static_cast<double>(n);
    const double bracket = std::sqrt(1.0 - frac * frac) - std::sqrt(std::max(0.0, 1.0 - nu * nu));
    if (!(bracket > 0.0)) return 0.0;
    return std::sqrt(2.0 * bracket / (kappa * (n - 1.0)));
}

/// Upper bound for the next integrability exponent given the current one:
/// q <= min{ p (n+2)/n, 1 + p (n+2)/n (a-4)/a, (a-2)/2 }.
inline double admissible_q_bound(double p, int n, double a) {
    if (!(p >= 1.0) || n < 1 || !(a > 2.0))
        throw std::invalid_argument("admissible_q_bound: need p >= 1, n >= 1, a > 2");
    const double growth = p * (n + 2.0) / static_cast<double>(n);
    return std::min({growth, 1.0 + growth * (a - 4.0) / a, (a - 2.0) / 2.0});
}

/// Combined space-time Hoelder exponent from Du in L^{n+alpha} (spatial
/// Morrey exponent delta = 1 - n/(n+alpha)) and the temporal L^2 modulus
/// exponent beta, balancing the radius rho = |t-s|^{beta/n}:
/// gamma = min(delta beta / n, beta / 2). Degenerate inputs give 0.
struct HoelderCombination {
    double delta = 0.0;    // spatial exponent from the Morrey embedding
    double epsilon = 0.0;  // radius balance exponent beta/n
    double gamma = 0.0;
    bool degenerate = false;
};

inline HoelderCombination hoelder_combine_parts(double alpha, double beta, int n) {
    if (n < 1) throw std::invalid_argument("hoelder_combine: need n >= 1");
    HoelderCombination out;
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.delta = 1.0 - static_cast<double>(n) / (n + alpha);
    out.epsilon = beta / n;
    out.gamma = std::min(out.delta * beta / n, beta / 2.0);
    return out;
}

inline double hoelder_combine(double alpha, double beta, int n) {
    return hoelder_combine_parts(alpha, beta, n).gamma;
}

/// Critical Stratonovich intensity: smallest sigma0 >= 0 such that the
/// shifted matrix A + sigma^2/2 passes the parabolic dispersion threshold
/// for every sigma > sigma0. Zero when A already passes (or n < 3).
inline double sigma_zero(double lambda0, double lambda1, int n) {
    if (!(lambda0 > 0.0) || !(lambda1 >= lambda0) || n < 1)
        throw std::invalid_argument("sigma_zero: need 0 < lambda0 <= lambda1, n >= 1");
    const double thresh = 1.0 - 2.0 / static_cast<double>(n);
    if (!(thresh > 0.0)) return 0.0;
    const double deficit = thresh * lambda1 - lambda0;
    return std::sqrt(static_cast<double>(n) * std::max(0.0, deficit));
}

}  // namespace pnl
