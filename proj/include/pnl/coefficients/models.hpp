#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pnl/core/rng.hpp"

namespace pnl {

/// kappa = 1/lambda1 and nu = lambda0/lambda1: the contraction parameters
/// induced by an ellipticity window [lambda0, lambda1].
inline std::pair<double, double> kappa_nu_from_lambdas(double lambda0, double lambda1) {
    if (!(lambda0 > 0.0) || !(lambda0 <= lambda1))
        throw std::invalid_argument("kappa_nu_from_lambdas: need 0 < lambda0 <= lambda1");
    return {1.0 / lambda1, lambda0 / lambda1};
}

/// Drift vector field A(x,t,u,z). Either a matrix field acting linearly on
/// the gradient (LinearMatrix) or a general callback with optional analytic
/// derivatives (CustomNonlinear; missing derivatives are finite-differenced).
class CoefficientModel {
public:
    enum class Kind { LinearMatrix, CustomNonlinear };

    // mat is row-major (n*N) x (n*N)
    using MatrixFn = std::function<void(const std::vector<double>& x, double t, std::vector<double>& mat)>;
    using VectorFieldFn = std::function<void(const std::vector<double>& x, double t,
                                             const std::vector<double>& u, const std::vector<double>& z,
                                             std::vector<double>& out)>;
    using ScalarFn = std::function<double(const std::vector<double>& x, double t)>;

    struct Params {
        double lambda0 = 1.0, lambda1 = 1.0;
        double kappa = 1.0, nu = 1.0;
        double L = 1.0;
        double a = 0.0;  // integrability exponent of f, must exceed n+2
    };

    static CoefficientModel linear_matrix(int n, int N, MatrixFn fn, Params params,
                                          bool symmetric, std::string name) {
        CoefficientModel m;
        m.kind_ = Kind::LinearMatrix;
        m.n_ = n;
        m.N_ = N;
        m.matrix_fn_ = std::move(fn);
        m.params_ = params;
        m.symmetric_ = symmetric;
        m.name_ = std::move(name);
        m.check_params();
        return m;
    }

    static CoefficientModel custom_nonlinear(int n, int N, VectorFieldFn fn, Params params,
                                             std::string name) {
        CoefficientModel m;
        m.kind_ = Kind::CustomNonlinear;
        m.n_ = n;
        m.N_ = N;
        m.field_fn_ = std::move(fn);
        m.params_ = params;
        m.symmetric_ = false;
        m.time_dependent_ = true;
        m.name_ = std::move(name);
        m.check_params();
        return m;
    }

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    int N() const { return N_; }
    int zdim() const { return n_ * N_; }
    const Params& params() const { return params_; }
    bool symmetric() const { return symmetric_; }
    const std::string& name() const { return name_; }
    bool time_dependent() const { return time_dependent_; }
    void set_time_dependent(bool td) { time_dependent_ = td; }

    void set_f(ScalarFn f) { f_fn_ = std::move(f); }
    double f(const std::vector<double>& x, double t) const { return f_fn_ ? f_fn_(x, t) : 0.0; }

    /// Optional analytic derivative overrides for CustomNonlinear models.
    void set_dz(VectorFieldFn dz_times) { dz_apply_ = std::move(dz_times); }

    void matrix_at(const std::vector<double>& x, double t, std::vector<double>& mat) const {
        if (kind_ != Kind::LinearMatrix)
            throw std::logic_error("CoefficientModel: matrix_at requires a LinearMatrix model");
        mat.assign(static_cast<std::size_t>(zdim()) * zdim(), 0.0);
        matrix_fn_(x, t, mat);
    }

    void eval(const std::vector<double>& x, double t, const std::vector<double>& u,
              const std::vector<double>& z, std::vector<double>& out) const {
        const int d = zdim();
        out.assign(d, 0.0);
        if (kind_ == Kind::LinearMatrix) {
            std::vector<double> mat;
            matrix_at(x, t, mat);
            for (int i = 0; i < d; ++i) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) s += mat[static_cast<std::size_t>(i) * d + j] * z[j];
                out[i] = s;
            }
        } else {
            field_fn_(x, t, u, z, out);
        }
        for (double v : out)
            if (!std::isfinite(v))
                throw std::runtime_error("CoefficientModel '" + name_ + "': non-finite evaluation");
    }

    /// Apply the gradient-variable Jacobian D_z A to a direction xi.
    void dz_apply(const std::vector<double>& x, double t, const std::vector<double>& u,
                  const std::vector<double>& z, const std::vector<double>& xi,
                  std::vector<double>& out) const {
        const int d = zdim();
        if (kind_ == Kind::LinearMatrix) {
            eval(x, t, u, xi, out);  // A is linear in z
            return;
        }
        if (dz_apply_) {
            dz_apply_(x, t, u, xi, out);
            return;
        }
        // Central finite differences along xi, step scaled to the argument.
        double zn = 0.0;
        for (double v : z) zn += v * v;
        const double eps = 1e-6 * (1.0 + std::sqrt(zn));
        std::vector<double> zp = z, zm = z, fp, fm;
        for (int j = 0; j < d; ++j) {
            zp[j] += eps * xi[j];
            zm[j] -= eps * xi[j];
        }
        eval(x, t, u, zp, fp);
        eval(x, t, u, zm, fm);
        out.assign(d, 0.0);
        for (int j = 0; j < d; ++j) out[j] = (fp[j] - fm[j]) / (2.0 * eps);
    }

private:
    void check_params() const {
        if (n_ < 1 || N_ < 1) throw std::invalid_argument("CoefficientModel: bad dimensions");
        if (!(params_.lambda0 > 0.0) || !(params_.lambda0 <= params_.lambda1))
            throw std::invalid_argument("CoefficientModel: need 0 < lambda0 <= lambda1");
        if (!(params_.kappa > 0.0) || !(params_.nu > 0.0) || !(params_.nu <= 1.0))
            throw std::invalid_argument("CoefficientModel: need kappa > 0 and nu in (0,1]");
    }

    Kind kind_ = Kind::LinearMatrix;
    int n_ = 0, N_ = 0;
    MatrixFn matrix_fn_;
    VectorFieldFn field_fn_;
    VectorFieldFn dz_apply_;
    ScalarFn f_fn_;
    Params params_;
    bool symmetric_ = true;
    bool time_dependent_ = false;
    std::string name_;
};

// ---------------------------------------------------------------------------
// Shipped model gallery

/// The heat case: A = identity on R^{nN}.
inline CoefficientModel make_identity_model(int n, int N) {
    CoefficientModel::Params p;
    p.lambda0 = p.lambda1 = 1.0;
    p.kappa = p.nu = 1.0;
    const int d = n * N;
    return CoefficientModel::linear_matrix(
        n, N,
        [d](const std::vector<double>&, double, std::vector<double>& mat) {
            for (int i = 0; i < d; ++i) mat[static_cast<std::size_t>(i) * d + i] = 1.0;
        },
        p, true, "identity");
}

/// Constant diagonal: lambda0 on every gradient index except the last, which
/// carries lambda1.
inline CoefficientModel make_diag_anisotropic(int n, int N, double lambda0, double lambda1) {
    auto [kappa, nu] = kappa_nu_from_lambdas(lambda0, lambda1);
    CoefficientModel::Params p;
    p.lambda0 = lambda0;
    p.lambda1 = lambda1;
    p.kappa = kappa;
    p.nu = nu;
    const int d = n * N;
    return CoefficientModel::linear_matrix(
        n, N,
        [d, lambda0, lambda1](const std::vector<double>&, double, std::vector<double>& mat) {
            for (int i = 0; i < d; ++i)
                mat[static_cast<std::size_t>(i) * d + i] = (i == d - 1) ? lambda1 : lambda0;
        },
        p, true, "diag-anisotropic");
}

/// x-dependent coupling: the first two gradient indices are diagonalized by a
/// rotation of angle 2 pi x_1, keeping the pointwise spectrum in
/// [lambda0, lambda1]. Smooth in x, so it satisfies the D_x bound.
inline CoefficientModel make_rotating_model(int n, int N, double lambda0, double lambda1) {
    if (n * N < 2) throw std::invalid_argument("make_rotating_model: needs n*N >= 2");
    auto [kappa, nu] = kappa_nu_from_lambdas(lambda0, lambda1);
    CoefficientModel::Params p;
    p.lambda0 = lambda0;
    p.lambda1 = lambda1;
    p.kappa = kappa;
    p.nu = nu;
    p.L = 2.0 * 3.14159265358979323846 * (lambda1 - lambda0) + lambda1;
    const int d = n * N;
    return CoefficientModel::linear_matrix(
        n, N,
        [d, lambda0, lambda1](const std::vector<double>& x, double, std::vector<double>& mat) {
            const double th = 2.0 * 3.14159265358979323846 * x[0];
            const double c = std::cos(th), s = std::sin(th);
            // R^T diag(l0, l1) R on the (0,1) block
            mat[0 * d + 0] = lambda0 * c * c + lambda1 * s * s;
            mat[0 * d + 1] = (lambda0 - lambda1) * c * s;
            mat[1 * d + 0] = (lambda0 - lambda1) * c * s;
            mat[1 * d + 1] = lambda0 * s * s + lambda1 * c * c;
            for (int i = 2; i < d; ++i) mat[static_cast<std::size_t>(i) * d + i] = lambda0;
        },
        p, true, "rotating");
}

inline CoefficientModel make_model(const std::string& name, int n, int N, double lambda0,
                                   double lambda1) {
    if (name == "identity") return make_identity_model(n, N);
    if (name == "diag-anisotropic") return make_diag_anisotropic(n, N, lambda0, lambda1);
    if (name == "rotating") return make_rotating_model(n, N, lambda0, lambda1);
    throw std::invalid_argument("unknown coefficient model '" + name +
                                "' (known: identity, diag-anisotropic, rotating)");
}

// ---------------------------------------------------------------------------
// Sampled verification of the structural assumptions

struct AssumptionReport {
    struct Entry {
        std::string condition;
        double max_violation;  // max over samples of lhs - rhs; <= 0 passes
    };
    std::vector<Entry> entries;

    bool pass(double tol = 0.0) const {
        for (const auto& e : entries)
            if (e.max_violation > tol) return false;
        return true;
    }
    double worst() const {
        double w = -std::numeric_limits<double>::infinity();
        for (const auto& e : entries) w = std::max(w, e.max_violation);
        return w;
    }
};

/// Sample the growth/ellipticity conditions on random (x,t,u,z,xi) draws and
/// report the worst residual per condition. Violations are data, not errors.
inline AssumptionReport check_GVA(const CoefficientModel& model, long sample_count,
                                  std::uint64_t rng_seed) {
    const int n = model.n(), N = model.N(), d = model.zdim();
    const auto& P = model.params();
    rng::Stream rs(rng_seed);
    double v_growth = -1e300, v_contract = -1e300, v_du = -1e300, v_dx = -1e300;

    std::vector<double> x(n), u(N), z(d), xi(d), Az, Mxi, tmp, up, um, xp, xm, fp, fm;
    for (long s = 0; s < sample_count; ++s) {
        for (int i = 0; i < n; ++i) x[i] = rs.uniform();
        const double t = rs.uniform();
        for (int i = 0; i < N; ++i) u[i] = 2.0 * rs.gaussian();
        for (int i = 0; i < d; ++i) z[i] = 2.0 * rs.gaussian();
        for (int i = 0; i < d; ++i) xi[i] = rs.gaussian();

        double un = 0.0, zn = 0.0, xin = 0.0;
        for (double v : u) un += v * v;
        for (double v : z) zn += v * v;
        for (double v : xi) xin += v * v;
        un = std::sqrt(un);
        zn = std::sqrt(zn);
        const double fv = model.f(x, t);

        // growth of A
        model.eval(x, t, u, z, Az);
        double An = 0.0;
        for (double v : Az) An += v * v;
        An = std::sqrt(An);
        const double fpow = P.a > 0.0 ? std::pow(std::abs(fv), P.a / 2.0) : std::abs(fv);
        v_growth = std::max(v_growth,
                            An - P.L * (zn + std::pow(un, (n + 2.0) / n) + fpow));

        // contraction |xi - kappa DzA xi|^2 <= (1 - nu^2) |xi|^2
        model.dz_apply(x, t, u, z, xi, Mxi);
        double lhs = 0.0;
        for (int i = 0; i < d; ++i) {
            const double r = xi[i] - P.kappa * Mxi[i];
            lhs += r * r;
        }
        v_contract = std::max(v_contract, lhs - (1.0 - P.nu * P.nu) * xin);

        // growth of D_u A (Frobenius over finite differences)
        {
            double fro2 = 0.0;
            const double eps = 1e-6 * (1.0 + un);
            up = u;
            um = u;
            for (int j = 0; j < N; ++j) {
                up[j] += eps;
                um[j] -= eps;
                model.eval(x, t, up, z, fp);
                model.eval(x, t, um, z, fm);
                for (int i = 0; i < d; ++i) {
                    const double g = (fp[i] - fm[i]) / (2.0 * eps);
                    fro2 += g * g;
                }
                up[j] = u[j];
                um[j] = u[j];
            }
            v_du = std::max(v_du, std::sqrt(fro2) -
                                      P.L * (std::pow(zn, 2.0 / (n + 2.0)) +
                                             std::pow(un, 2.0 / n) + std::abs(fv)));
        }

        // growth of D_x A
        {
            double fro2 = 0.0;
            const double eps = 1e-6;
            xp = x;
            xm = x;
            for (int j = 0; j < n; ++j) {
                xp[j] += eps;
                xm[j] -= eps;
                model.eval(xp, t, u, z, fp);
                model.eval(xm, t, u, z, fm);
                for (int i = 0; i < d; ++i) {
                    const double g = (fp[i] - fm[i]) / (2.0 * eps);
                    fro2 += g * g;
                }
                xp[j] = x[j];
                xm[j] = x[j];
            }
            v_dx = std::max(v_dx, std::sqrt(fro2) -
                                      P.L * (zn + std::pow(un, (n + 2.0) / n) + fv * fv));
        }
    }

    AssumptionReport rep;
    rep.entries = {{"growth_A", v_growth},
                   {"contraction_DzA", v_contract},
                   {"growth_DuA", v_du},
                   {"growth_DxA", v_dx}};
    return rep;
}

}  // namespace pnl
