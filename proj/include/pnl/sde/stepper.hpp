#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnl/coefficients/models.hpp"
#include "pnl/coefficients/noise.hpp"
#include "pnl/core/calculus.hpp"
#include "pnl/core/field.hpp"
#include "pnl/sde/brownian.hpp"

namespace pnl {

enum class Scheme { ItoSemiImplicit, StratonovichCorrected };

struct StepFailure : std::runtime_error {
    explicit StepFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Engine-level run description. dt = T/steps must satisfy the gradient-noise
/// stability bound dt <= c_safe h_min^2 / L_H^2.
struct SimConfig {
    GridSpec grid;
    CoefficientModel model;
    NoiseModel noise;
    Scheme scheme = Scheme::ItoSemiImplicit;
    double T = 1.0;
    long steps = 1;
    Field u0;
    long snapshot_every = 1;
    double c_safe = 0.5;
    double sigma = 0.0;  // Stratonovich intensity; only used by the corrected scheme
    double solver_tol = 1e-10;
    long solver_max_iter_per_node = 10;
    double blowup_threshold = 1e12;

    double dt() const { return T / static_cast<double>(steps); }

    double noise_cfl_bound() const {
        const double lh = scheme == Scheme::StratonovichCorrected ? std::abs(sigma)
                                                                  : noise.lipschitz();
        if (lh <= 0.0) return std::numeric_limits<double>::infinity();
        const double h = grid.spacing_min();
        return c_safe * h * h / (lh * lh);
    }

    void validate() const {
        if (!(T > 0.0) || steps < 1) throw std::invalid_argument("SimConfig: need T > 0, steps >= 1");
        if (!u0.all_finite()) throw std::invalid_argument("SimConfig: non-finite initial data");
        if (!u0.grid().same_shape(grid)) throw std::invalid_argument("SimConfig: u0 grid mismatch");
        const double bound = noise_cfl_bound();
        if (dt() > bound * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "SimConfig: gradient-noise stability requires dt <= c_safe*h^2/L_H^2 = " << bound
               << ", got dt = " << dt();
            throw std::invalid_argument(os.str());
        }
    }
};

struct SimResult {
    Trajectory trajectory;
    std::optional<long> blowup_step;
    long solver_iterations = 0;
};

/// Semi-implicit time stepper: the diffusion flux is linearized at the
/// current state and treated implicitly, the noise explicitly. One instance
/// owns its workspace; use one per concurrent simulation.
class Stepper {
public:
    Stepper(const GridSpec& grid, const CoefficientModel& model, const NoiseModel& noise,
            double solver_tol = 1e-10, long solver_max_iter_per_node = 10,
            double blowup_threshold = 1e12)
        : grid_(grid), model_(model), noise_(noise), n_(grid.dim()), N_(model.N()),
          d_(model.zdim()), nodes_(grid.node_count()), tol_(solver_tol),
          max_iter_(solver_max_iter_per_node * grid.node_count()), blowup_(blowup_threshold) {
        if (model.n() != n_) throw std::invalid_argument("Stepper: model dimension mismatch");
        build_neighbor_tables();
        grad_.resize(static_cast<std::size_t>(nodes_) * d_);
        flux_.resize(static_cast<std::size_t>(nodes_) * d_);
        mat_.resize(static_cast<std::size_t>(nodes_) * d_ * d_);
        coords_.resize(static_cast<std::size_t>(nodes_) * n_);
        std::vector<long> idx;
        std::vector<double> x;
        boundary_.assign(nodes_, 0);
        for (long p = 0; p < nodes_; ++p) {
            grid_.unravel(p, idx);
            grid_.coords(idx, x);
            for (int k = 0; k < n_; ++k) coords_[p * n_ + k] = x[k];
            boundary_[p] = grid_.is_boundary_node(idx) ? 1 : 0;
        }
        if (model_.kind() == CoefficientModel::Kind::LinearMatrix) freeze_linear_matrix(0.0);
    }

    long last_solve_iterations() const { return iters_; }

    /// One Ito step u -> u'. Returns false when the updated state crossed the
    /// blow-up threshold (the caller records and stops; not an error).
    bool step(Field& u, double t, double dt, const double* dB, const Field& trace) {
        forward_gradient(u.values().data(), grad_.data());
        if (model_.kind() == CoefficientModel::Kind::LinearMatrix) {
            if (model_.time_dependent()) freeze_linear_matrix(t);
        } else {
            freeze_nonlinear(t, u);
        }

        // rhs = u + dt div(A(u) - M Du) + H(Du) dB, boundary rows pinned
        rhs_.assign(u.values().begin(), u.values().end());
        add_noise(t, dB);
        if (model_.kind() != CoefficientModel::Kind::LinearMatrix) add_remainder(t, u, dt);
        for (long p = 0; p < nodes_; ++p)
            if (boundary_[p])
                for (int c = 0; c < N_; ++c) rhs_[p * N_ + c] = trace.at(p, c);

        dt_ = dt;
        solve(u.values());

        double sup = 0.0;
        bool finite = true;
        for (double v : u.values()) {
            if (!std::isfinite(v)) { finite = false; break; }
            sup = std::max(sup, std::abs(v));
        }
        return finite && sup <= blowup_;
    }

    /// Apply v -> v - dt div(M grad v) with pinned Dirichlet rows. Exposed for
    /// operator identity tests.
    void apply_operator(double dt, const std::vector<double>& v, std::vector<double>& out) {
        dt_ = dt;
        work_grad_.resize(static_cast<std::size_t>(nodes_) * d_);
        work_flux_.resize(static_cast<std::size_t>(nodes_) * d_);
        out.resize(v.size());
        apply(v.data(), out.data());
    }

private:
    void build_neighbor_tables() {
        fwd_.assign(static_cast<std::size_t>(n_) * nodes_, 0);
        bwd_.assign(static_cast<std::size_t>(n_) * nodes_, 0);
        for (int k = 0; k < n_; ++k)
            for (long p = 0; p < nodes_; ++p) {
                const long ik = grid_.axis_index(p, k);
                const bool per = grid_.boundary() == Boundary::Periodic;
                fwd_[k * nodes_ + p] = (per || ik + 1 < grid_.nodes()[k]) ? grid_.shifted(p, k, +1) : p;
                bwd_[k * nodes_ + p] = (per || ik > 0) ? grid_.shifted(p, k, -1) : p;
            }
    }

    // grad[p*d + k*N + c] = (v[fwd] - v[p]) / h_k  (zero on the far edge where fwd==p)
    void forward_gradient(const double* v, double* grad) const {
        for (int k = 0; k < n_; ++k) {
            const double inv_h = 1.0 / grid_.spacing()[k];
            const long* fw = &fwd_[k * nodes_];
            for (long p = 0; p < nodes_; ++p) {
                const long q = fw[p];
                for (int c = 0; c < N_; ++c)
                    grad[p * d_ + k * N_ + c] = (v[q * N_ + c] - v[p * N_ + c]) * inv_h;
            }
        }
    }

    // out[p*N+c] -= dt * backward-div of flux (skipped on pinned rows)
    void subtract_divergence(const double* flux, double dt, double* out) const {
        for (int k = 0; k < n_; ++k) {
            const double w = dt / grid_.spacing()[k];
            const long* bw = &bwd_[k * nodes_];
            for (long p = 0; p < nodes_; ++p) {
                if (boundary_[p]) continue;
                const long q = bw[p];
                for (int c = 0; c < N_; ++c)
                    out[p * N_ + c] -=
                        w * (flux[p * d_ + k * N_ + c] - (q == p ? 0.0 : flux[q * d_ + k * N_ + c]));
            }
        }
    }

    void freeze_linear_matrix(double t) {
        std::vector<double> x(n_), m;
        for (long p = 0; p < nodes_; ++p) {
            for (int k = 0; k < n_; ++k) x[k] = coords_[p * n_ + k];
            model_.matrix_at(x, t, m);
            for (int i = 0; i < d_ * d_; ++i) mat_[static_cast<std::size_t>(p) * d_ * d_ + i] = m[i];
        }
    }

    void freeze_nonlinear(double t, const Field& u) {
        // Tangent matrix D_z A at (x, t, u^m, Du^m), column by column.
        std::vector<double> x(n_), uu(N_), z(d_), e(d_), col;
        for (long p = 0; p < nodes_; ++p) {
            for (int k = 0; k < n_; ++k) x[k] = coords_[p * n_ + k];
            for (int c = 0; c < N_; ++c) uu[c] = u.at(p, c);
            for (int j = 0; j < d_; ++j) z[j] = grad_[p * d_ + j];
            for (int j = 0; j < d_; ++j) {
                std::fill(e.begin(), e.end(), 0.0);
                e[j] = 1.0;
                model_.dz_apply(x, t, uu, z, e, col);
                for (int i = 0; i < d_; ++i)
                    mat_[(static_cast<std::size_t>(p) * d_ + i) * d_ + j] = col[i];
            }
        }
    }

    void add_remainder(double t, const Field& u, double dt) {
        // flux = A(x,t,u,Du) - M Du; rhs += dt div(flux)
        std::vector<double> x(n_), uu(N_), z(d_), Az;
        for (long p = 0; p < nodes_; ++p) {
            for (int k = 0; k < n_; ++k) x[k] = coords_[p * n_ + k];
            for (int c = 0; c < N_; ++c) uu[c] = u.at(p, c);
            for (int j = 0; j < d_; ++j) z[j] = grad_[p * d_ + j];
            model_.eval(x, t, uu, z, Az);
            const double* M = &mat_[static_cast<std::size_t>(p) * d_ * d_];
            for (int i = 0; i < d_; ++i) {
                double mz = 0.0;
                for (int j = 0; j < d_; ++j) mz += M[i * d_ + j] * z[j];
                flux_[p * d_ + i] = Az[i] - mz;
            }
        }
        subtract_divergence(flux_.data(), -dt, rhs_.data());
    }

    void add_noise(double t, const double* dB) {
        if (noise_.is_zero() || dB == nullptr) return;
        const int np = noise_.nprime();
        std::vector<double> x(n_), z(d_), H;
        for (long p = 0; p < nodes_; ++p) {
            if (boundary_[p]) continue;
            for (int k = 0; k < n_; ++k) x[k] = coords_[p * n_ + k];
            for (int j = 0; j < d_; ++j) z[j] = grad_[p * d_ + j];
            noise_.eval(x, t, z, H);
            for (int c = 0; c < N_; ++c) {
                double s = 0.0;
                for (int j = 0; j < np; ++j) s += H[j * N_ + c] * dB[j];
                rhs_[p * N_ + c] += s;
            }
        }
    }

    // out = v - dt div(M grad v); identity on pinned rows
    void apply(const double* v, double* out) {
        forward_gradient(v, work_grad_.data());
        for (long p = 0; p < nodes_; ++p) {
            const double* M = &mat_[static_cast<std::size_t>(p) * d_ * d_];
            const double* g = &work_grad_[static_cast<std::size_t>(p) * d_];
            double* fl = &work_flux_[static_cast<std::size_t>(p) * d_];
            for (int i = 0; i < d_; ++i) {
                double s = 0.0;
                for (int j = 0; j < d_; ++j) s += M[i * d_ + j] * g[j];
                fl[i] = s;
            }
        }
        const std::size_t nv = static_cast<std::size_t>(nodes_) * N_;
        for (std::size_t i = 0; i < nv; ++i) out[i] = v[i];
        subtract_divergence(work_flux_.data(), dt_, out);
    }

    void solve(std::vector<double>& u) {
        const std::size_t nv = static_cast<std::size_t>(nodes_) * N_;
        work_grad_.resize(static_cast<std::size_t>(nodes_) * d_);
        work_flux_.resize(static_cast<std::size_t>(nodes_) * d_);
        if (model_.symmetric()) solve_cg(u, nv);
        else solve_bicgstab(u, nv);
    }

    static double dot(const std::vector<double>& a, const std::vector<double>& b, std::size_t nv) {
        double s = 0.0;
        for (std::size_t i = 0; i < nv; ++i) s += a[i] * b[i];
        return s;
    }

    void solve_cg(std::vector<double>& u, std::size_t nv) {
        r_.resize(nv); p_.resize(nv); ap_.resize(nv);
        apply(u.data(), ap_.data());
        double rr = 0.0, bb = 0.0;
        for (std::size_t i = 0; i < nv; ++i) {
            r_[i] = rhs_[i] - ap_[i];
            p_[i] = r_[i];
            rr += r_[i] * r_[i];
            bb += rhs_[i] * rhs_[i];
        }
        const double stop = tol_ * tol_ * std::max(bb, 1e-300);
        iters_ = 0;
        while (rr > stop && iters_ < max_iter_) {
            apply(p_.data(), ap_.data());
            const double pap = dot(p_, ap_, nv);
            if (!(std::abs(pap) > 0.0) || !std::isfinite(pap))
                throw StepFailure("linear solve breakdown (CG): p.Ap = " + std::to_string(pap));
            const double alpha = rr / pap;
            for (std::size_t i = 0; i < nv; ++i) {
                u[i] += alpha * p_[i];
                r_[i] -= alpha * ap_[i];
            }
            const double rr_new = dot(r_, r_, nv);
            const double beta = rr_new / rr;
            for (std::size_t i = 0; i < nv; ++i) p_[i] = r_[i] + beta * p_[i];
            rr = rr_new;
            ++iters_;
        }
        if (rr > stop)
            throw StepFailure("linear solve did not converge (CG): residual^2 = " +
                              std::to_string(rr) + " after " + std::to_string(iters_) + " iterations");
    }

    void solve_bicgstab(std::vector<double>& u, std::size_t nv) {
        r_.resize(nv); r0_.resize(nv); p_.resize(nv); v_.resize(nv); s_.resize(nv); t2_.resize(nv);
        apply(u.data(), v_.data());
        double bb = 0.0;
        for (std::size_t i = 0; i < nv; ++i) {
            r_[i] = rhs_[i] - v_[i];
            r0_[i] = r_[i];
            bb += rhs_[i] * rhs_[i];
        }
        const double stop = tol_ * tol_ * std::max(bb, 1e-300);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        std::fill(p_.begin(), p_.end(), 0.0);
        std::fill(v_.begin(), v_.end(), 0.0);
        double rr = dot(r_, r_, nv);
        iters_ = 0;
        while (rr > stop && iters_ < max_iter_) {
            const double rho_new = dot(r0_, r_, nv);
            if (!std::isfinite(rho_new) || rho_new == 0.0)
                throw StepFailure("linear solve breakdown (BiCGStab): rho = " + std::to_string(rho_new));
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (std::size_t i = 0; i < nv; ++i) p_[i] = r_[i] + beta * (p_[i] - omega * v_[i]);
            apply(p_.data(), v_.data());
            alpha = rho / dot(r0_, v_, nv);
            for (std::size_t i = 0; i < nv; ++i) s_[i] = r_[i] - alpha * v_[i];
            apply(s_.data(), t2_.data());
            const double tt = dot(t2_, t2_, nv);
            omega = tt > 0.0 ? dot(t2_, s_, nv) / tt : 0.0;
            for (std::size_t i = 0; i < nv; ++i) {
                u[i] += alpha * p_[i] + omega * s_[i];
                r_[i] = s_[i] - omega * t2_[i];
            }
            rr = dot(r_, r_, nv);
            ++iters_;
        }
        if (rr > stop)
            throw StepFailure("linear solve did not converge (BiCGStab): residual^2 = " +
                              std::to_string(rr));
    }

    const GridSpec grid_;
    const CoefficientModel model_;
    const NoiseModel noise_;
    int n_, N_, d_;
    long nodes_;
    double tol_;
    long max_iter_;
    double blowup_;
    double dt_ = 0.0;
    long iters_ = 0;

    std::vector<long> fwd_, bwd_;
    std::vector<char> boundary_;
    std::vector<double> coords_, mat_, grad_, flux_, rhs_;
    std::vector<double> work_grad_, work_flux_, r_, r0_, p_, v_, s_, t2_, ap_;
};

/// Single Ito step of du = div A dt + H dB with default solver settings.
inline Field step_ito(const Field& u, double t, double dt, const std::vector<double>& dB,
                      const CoefficientModel& model, const NoiseModel& noise) {
    Stepper st(u.grid(), model, noise);
    Field out = u;
    if (!st.step(out, t, dt, dB.empty() ? nullptr : dB.data(), u))
        throw StepFailure("step_ito: state crossed the blow-up threshold");
    return out;
}

/// Shift a linear model by the Stratonovich correction sigma^2/2 * identity.
inline CoefficientModel stratonovich_shifted_model(const CoefficientModel& A, double sigma) {
    if (A.kind() != CoefficientModel::Kind::LinearMatrix)
        throw std::invalid_argument("stratonovich correction requires a linear coefficient model");
    const int d = A.zdim();
    const double shift = 0.5 * sigma * sigma;
    CoefficientModel::Params p = A.params();
    p.lambda0 += shift;
    p.lambda1 += shift;
    auto [kappa, nu] = kappa_nu_from_lambdas(p.lambda0, p.lambda1);
    p.kappa = kappa;
    p.nu = nu;
    const CoefficientModel base = A;
    return CoefficientModel::linear_matrix(
        A.n(), A.N(),
        [base, d, shift](const std::vector<double>& x, double t, std::vector<double>& mat) {
            std::vector<double> m;
            base.matrix_at(x, t, m);
            for (int i = 0; i < d * d; ++i) mat[i] = m[i];
            for (int i = 0; i < d; ++i) mat[static_cast<std::size_t>(i) * d + i] += shift;
        },
        p, base.symmetric(), base.name() + "+strat");
}

/// One step of the Stratonovich system du = div(A Du) dt + sigma Du o dB via
/// its Ito form: drift matrix A + sigma^2/2, explicit noise sigma Du dB.
inline Field step_stratonovich_linear(const Field& u, double t, double dt,
                                      const std::vector<double>& dB, const CoefficientModel& A,
                                      double sigma) {
    return step_ito(u, t, dt, dB, stratonovich_shifted_model(A, sigma),
                    NoiseModel::linear_gradient(u.grid().dim(), u.components(), sigma));
}

/// Run the configured scheme along one Brownian path.
inline SimResult simulate(const SimConfig& cfg, const BrownianPath& path) {
    cfg.validate();
    if (static_cast<long>(path.steps()) != cfg.steps)
        throw std::invalid_argument("simulate: path step count does not match config");

    const CoefficientModel model = cfg.scheme == Scheme::StratonovichCorrected
                                       ? stratonovich_shifted_model(cfg.model, cfg.sigma)
                                       : cfg.model;
    const NoiseModel noise = cfg.scheme == Scheme::StratonovichCorrected
                                 ? NoiseModel::linear_gradient(cfg.grid.dim(), cfg.model.N(), cfg.sigma)
                                 : cfg.noise;

    Stepper st(cfg.grid, model, noise, cfg.solver_tol, cfg.solver_max_iter_per_node,
               cfg.blowup_threshold);
    SimResult res;
    Field u = cfg.u0;
    res.trajectory.times.push_back(0.0);
    res.trajectory.frames.push_back(u);
    std::vector<double> dB(noise.nprime(), 0.0);
    for (long m = 0; m < cfg.steps; ++m) {
        const double t = path.times[m];
        const double dt = path.dt(m);
        for (int d = 0; d < noise.nprime(); ++d)
            dB[d] = d < path.nprime ? path.increment(m, d) : 0.0;
        const bool ok = st.step(u, t, dt, dB.data(), cfg.u0);
        res.solver_iterations += st.last_solve_iterations();
        if (!ok) {
            res.blowup_step = m + 1;
            break;
        }
        if ((m + 1) % cfg.snapshot_every == 0 || m + 1 == cfg.steps) {
            res.trajectory.times.push_back(path.times[m + 1]);
            res.trajectory.frames.push_back(u);
        }
    }
    return res;
}

}  // namespace pnl
