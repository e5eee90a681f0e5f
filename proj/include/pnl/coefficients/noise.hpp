#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnl/coefficients/models.hpp"

namespace pnl {

/// Noise field H(x,t,z) with values in R^{n' N}, layout [dim*N + component].
class NoiseModel {
public:
    enum class Kind { Additive, LinearGradient, CustomLipschitz };

    using FieldFn = std::function<void(const std::vector<double>& x, double t,
                                       const std::vector<double>& z, std::vector<double>& out)>;
    using ScalarFn = std::function<double(const std::vector<double>& x, double t)>;

    /// Deterministic forcing g(x,t); independent of the gradient, L_H = 0.
    static NoiseModel additive(int n, int N, int nprime, FieldFn g, double growth = 1.0) {
        NoiseModel m;
        m.kind_ = Kind::Additive;
        m.n_ = n;
        m.N_ = N;
        m.nprime_ = nprime;
        m.fn_ = std::move(g);
        m.lh_ = 0.0;
        m.L_ = growth;
        m.name_ = "additive";
        return m;
    }

    /// H(z) = sigma z with n' = n; Lipschitz constant exactly sigma.
    static NoiseModel linear_gradient(int n, int N, double sigma) {
        NoiseModel m;
        m.kind_ = Kind::LinearGradient;
        m.n_ = n;
        m.N_ = N;
        m.nprime_ = n;
        m.sigma_ = sigma;
        m.lh_ = std::abs(sigma);
        m.L_ = std::abs(sigma);
        m.name_ = "grad-linear";
        return m;
    }

    static NoiseModel custom(int n, int N, int nprime, FieldFn h, double lipschitz, double growth,
                             std::string name = "custom") {
        NoiseModel m;
        m.kind_ = Kind::CustomLipschitz;
        m.n_ = n;
        m.N_ = N;
        m.nprime_ = nprime;
        m.fn_ = std::move(h);
        m.lh_ = lipschitz;
        m.L_ = growth;
        m.name_ = std::move(name);
        return m;
    }

    static NoiseModel none(int n, int N) { return additive(n, N, 1, FieldFn{}, 0.0); }

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    int N() const { return N_; }
    int nprime() const { return nprime_; }
    double lipschitz() const { return lh_; }
    double growth() const { return L_; }
    double sigma() const { return sigma_; }
    const std::string& name() const { return name_; }
    bool is_zero() const { return kind_ == Kind::Additive && !fn_; }

    void set_fH(ScalarFn f) { fH_ = std::move(f); }
    double fH(const std::vector<double>& x, double t) const { return fH_ ? fH_(x, t) : 0.0; }

    void eval(const std::vector<double>& x, double t, const std::vector<double>& z,
              std::vector<double>& out) const {
        out.assign(static_cast<std::size_t>(nprime_) * N_, 0.0);
        switch (kind_) {
            case Kind::Additive:
                if (fn_) fn_(x, t, z, out);
                break;
            case Kind::LinearGradient:
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigma_ * z[i];
                break;
            case Kind::CustomLipschitz:
                fn_(x, t, z, out);
                break;
        }
        for (double v : out)
            if (!std::isfinite(v)) throw std::runtime_error("NoiseModel: non-finite evaluation");
    }

private:
    Kind kind_ = Kind::Additive;
    int n_ = 0, N_ = 0, nprime_ = 1;
    FieldFn fn_;
    ScalarFn fH_;
    double sigma_ = 0.0, lh_ = 0.0, L_ = 1.0;
    std::string name_;
};

inline void eval_H(const NoiseModel& noise, const std::vector<double>& x, double t,
                   const std::vector<double>& z, std::vector<double>& out) {
    noise.eval(x, t, z, out);
}

/// Sampled verification of the Lipschitz and growth bounds on H.
inline AssumptionReport check_GVH(const NoiseModel& noise, long sample_count,
                                  std::uint64_t rng_seed) {
    const int n = noise.n(), d = noise.n() * noise.N();
    rng::Stream rs(rng_seed);
    double v_lip = -1e300, v_growth = -1e300;
    std::vector<double> x(n), z(d), zt(d), hz, hzt;
    for (long s = 0; s < sample_count; ++s) {
        for (int i = 0; i < n; ++i) x[i] = rs.uniform();
        const double t = rs.uniform();
        for (int i = 0; i < d; ++i) z[i] = 2.0 * rs.gaussian();
        for (int i = 0; i < d; ++i) zt[i] = 2.0 * rs.gaussian();
        noise.eval(x, t, z, hz);
        noise.eval(x, t, zt, hzt);

        double diff = 0.0, dz = 0.0, hn = 0.0, zn = 0.0;
        for (std::size_t i = 0; i < hz.size(); ++i) {
            const double r = hz[i] - hzt[i];
            diff += r * r;
            hn += hz[i] * hz[i];
        }
        for (int i = 0; i < d; ++i) {
            const double r = z[i] - zt[i];
            dz += r * r;
            zn += z[i] * z[i];
        }
        v_lip = std::max(v_lip, std::sqrt(diff) - noise.lipschitz() * std::sqrt(dz));
        v_growth = std::max(v_growth,
                            std::sqrt(hn) - noise.growth() * (noise.fH(x, t) + std::sqrt(zn)));
    }
    AssumptionReport rep;
    rep.entries = {{"lipschitz_H", v_lip}, {"growth_H", v_growth}};
    return rep;
}

}  // namespace pnl
