#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pnl {

/// Dispersion factor mu(s) = 1 - (s/(2+s))^2 for the power test map
/// v = u |u|^s.
inline double mu_power(double s) {
    if (!(s > -1.0)) throw std::domain_error("mu_power: requires s > -1");
    const double r = s / (2.0 + s);
    return 1.0 - r * r;
}

/// Dispersion factor mu(q) = 1 - ((q-1)/q)^2 for the truncated power map;
/// equals mu_power(2(q-1)) identically.
inline double mu_trunc(double q) {
    if (!(q >= 1.0)) throw std::domain_error("mu_trunc: requires q >= 1");
    const double r = (q - 1.0) / q;
    return 1.0 - r * r;
}

/// C^2 truncated power family: T(t) = t^{2q} for t <= K, and the quadratic
/// a K^{2q-2} t^2 + b K^{2q-1} t + c K^{2q} beyond, with (a, b, c) solving the
/// C^2 matching system at t = K. Strictly increasing and convex on (0, inf).
class TruncationFamily {
public:
    TruncationFamily(double q, double K) : q_(q), K_(K) {
        if (!(q >= 1.0)) throw std::invalid_argument("TruncationFamily: q must be >= 1");
        if (!(K > 0.0)) throw std::invalid_argument("TruncationFamily: K must be positive");
        a_ = q * (2.0 * q - 1.0);
        b_ = -4.0 * q * (q - 1.0);
        c_ = 1.0 - 3.0 * q + 2.0 * q * q;
    }

    double q() const { return q_; }
    double K() const { return K_; }
    double coeff_a() const { return a_; }
    double coeff_b() const { return b_; }
    double coeff_c() const { return c_; }

    struct Eval {
        double T, T1, T2;  // value, first and second derivative
    };

    Eval eval(double t) const {
        if (!(t >= 0.0)) throw std::domain_error("TruncationFamily: t must be >= 0");
        if (t <= K_) {
            const double p = std::pow(t, 2.0 * q_ - 2.0);
            return {p * t * t, 2.0 * q_ * p * t, 2.0 * q_ * (2.0 * q_ - 1.0) * p};
        }
        const double A = a_ * std::pow(K_, 2.0 * q_ - 2.0);
        const double B = b_ * std::pow(K_, 2.0 * q_ - 1.0);
        const double C = c_ * std::pow(K_, 2.0 * q_);
        return {A * t * t + B * t + C, 2.0 * A * t + B, 2.0 * A};
    }

private:
    double q_, K_, a_, b_, c_;
};

inline TruncationFamily::Eval truncation_eval(const TruncationFamily& fam, double t) {
    return fam.eval(t);
}

/// Outcome of the gradient-alignment inequality Du . Dv >= sqrt(mu) |Du| |Dv|.
struct PairCheck {
    std::vector<double> Dv;  // n*N entries, [axis*N + component]
    double lhs = 0.0;        // Du . Dv
    double rhs = 0.0;        // sqrt(mu) |Du| |Dv|
    double dv_norm = 0.0;
    double du_norm = 0.0;
};

namespace detail {
inline double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}
}  // namespace detail

/// Chain-rule evaluation of v = T'(|u|) |u|^{-1} u at one point, together
/// with both sides of the alignment inequality. u must be nonzero.
///
/// G is interpreted as Du with layout G[i*N + a] = D_i u^a.
inline PairCheck truncation_pair(const TruncationFamily& fam, const std::vector<double>& u,
                                 const std::vector<double>& G, int n) {
    const int N = static_cast<int>(u.size());
    if (static_cast<int>(G.size()) != n * N)
        throw std::invalid_argument("truncation_pair: gradient size mismatch");
    double r2 = 0.0;
    for (double x : u) r2 += x * x;
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw std::domain_error("truncation_pair: u must be nonzero");

    const auto e = fam.eval(r);
    const double radial = e.T2 * r - e.T1;  // T''(r) r - T'(r), nonnegative

    PairCheck out;
    out.Dv.assign(static_cast<std::size_t>(n) * N, 0.0);
    for (int i = 0; i < n; ++i) {
        double gu = 0.0;  // D_i u . u
        for (int a = 0; a < N; ++a) gu += G[i * N + a] * u[a];
        for (int a = 0; a < N; ++a)
            out.Dv[i * N + a] = e.T1 * G[i * N + a] / r + radial * gu * u[a] / (r2 * r);
    }
    for (std::size_t j = 0; j < out.Dv.size(); ++j) out.lhs += G[j] * out.Dv[j];
    out.du_norm = detail::vec_norm(G);
    out.dv_norm = detail::vec_norm(out.Dv);
    out.rhs = std::sqrt(mu_trunc(fam.q())) * out.du_norm * out.dv_norm;
    return out;
}

/// Same check for the plain power map v = u |u|^s with
/// Dv = |u|^s Du + s |u|^{s-2} (Du . u) (x) u.
inline PairCheck power_pair(double s, const std::vector<double>& u, const std::vector<double>& G,
                            int n) {
    const int N = static_cast<int>(u.size());
    if (static_cast<int>(G.size()) != n * N)
        throw std::invalid_argument("power_pair: gradient size mismatch");
    double r2 = 0.0;
    for (double x : u) r2 += x * x;
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw std::domain_error("power_pair: u must be nonzero");

    const double rs = std::pow(r, s);
    PairCheck out;
    out.Dv.assign(static_cast<std::size_t>(n) * N, 0.0);
    for (int i = 0; i < n; ++i) {
        double gu = 0.0;
        for (int a = 0; a < N; ++a) gu += G[i * N + a] * u[a];
        for (int a = 0; a < N; ++a)
            out.Dv[i * N + a] = rs * G[i * N + a] + s * rs / r2 * gu * u[a];
    }
    for (std::size_t j = 0; j < out.Dv.size(); ++j) out.lhs += G[j] * out.Dv[j];
    out.du_norm = detail::vec_norm(G);
    out.dv_norm = detail::vec_norm(out.Dv);
    out.rhs = std::sqrt(mu_power(s)) * out.du_norm * out.dv_norm;
    return out;
}

}  // namespace pnl
