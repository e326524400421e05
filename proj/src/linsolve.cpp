#include "surfns/linsolve.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "surfns/calculus.hpp"
#include "surfns/errors.hpp"
#include "surfns/log.hpp"

namespace surfns {

namespace {

template <class Field>
Field zeros_like(const Field& f) {
    Field z = f;
    scale(z, 0.0);
    z.halos_valid = true;
    return z;
}

// Plain CG; returns false on breakdown or stall so the caller can fall back.
template <class Field, class Op>
bool cg(const Op& A, const Field& b, Field& x, const KrylovConfig& cfg, SolveStats& st) {
    const double bnorm = norm_l2(b);
    const double target = std::max(cfg.tol * (bnorm > 0 ? bnorm : 1.0), cfg.abs_tol);

    Field Ax = A(x);
    Field r = b;
    axpy(-1.0, Ax, r);
    Field p = r;
    double rs = inner_l2(r, r);
    double rnorm = std::sqrt(rs);
    double best = rnorm;
    int since_best = 0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (rnorm <= target) {
            st.iterations += it;
            st.residual = rnorm / (bnorm > 0 ? bnorm : 1.0);
            st.converged = true;
            st.method = "cg";
            return true;
        }
        Field Ap = A(p);
        const double pAp = inner_l2(p, Ap);
        if (!(pAp > 0.0)) {
            SURFNS_DEBUG("cg breakdown at iter %d (pAp=%.3e)", it, pAp);
            st.iterations += it;
            return false;
        }
        const double alpha = rs / pAp;
        axpy(alpha, p, x);
        axpy(-alpha, Ap, r);
        const double rs_new = inner_l2(r, r);
        rnorm = std::sqrt(rs_new);
        if (rnorm < best) {
            best = rnorm;
            since_best = 0;
        } else if (++since_best > 200) {
            // Pure safety net: a plateau this long on a near-SPD system means
            // rounding has taken over and GMRES should finish the job.
            SURFNS_DEBUG("cg stall at iter %d (res=%.3e)", it, rnorm);
            st.iterations += it;
            return false;
        }
        const double beta = rs_new / rs;
        rs = rs_new;
        // p = r + beta p
        scale(p, beta);
        axpy(1.0, r, p);
    }
    st.iterations += cfg.max_iter;
    st.residual = rnorm / (bnorm > 0 ? bnorm : 1.0);
    st.method = "cg";
    return st.converged = rnorm <= target;
}

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
template <class Field, class Op>
void gmres(const Op& A, const Field& b, Field& x, const KrylovConfig& cfg, SolveStats& st) {
    const double bnorm = norm_l2(b);
    const double target = std::max(cfg.tol * (bnorm > 0 ? bnorm : 1.0), cfg.abs_tol);
    const int m = cfg.restart;
    st.method = st.method.empty() ? "gmres" : st.method + "+gmres";

    int total = st.iterations;
    while (total < cfg.max_iter) {
        Field Ax = A(x);
        Field r = b;
        axpy(-1.0, Ax, r);
        double beta = norm_l2(r);
        st.residual = beta / (bnorm > 0 ? bnorm : 1.0);
        if (beta <= target) {
            st.converged = true;
            st.iterations = total;
            return;
        }

        std::vector<Field> V;
        V.reserve(m + 1);
        scale(r, 1.0 / beta);
        V.push_back(r);

        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
        g(0) = beta;
        std::vector<double> cs(m, 0.0), sn(m, 0.0);

        int k = 0;
        for (; k < m && total < cfg.max_iter; ++k, ++total) {
            Field w = A(V[k]);
            for (int i = 0; i <= k; ++i) {
                H(i, k) = inner_l2(w, V[i]);
                axpy(-H(i, k), V[i], w);
            }
            H(k + 1, k) = norm_l2(w);
            bool happy = H(k + 1, k) == 0.0;
            if (!happy) {
                scale(w, 1.0 / H(k + 1, k));
                V.push_back(w);
            }
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const double denom = std::hypot(H(k, k), H(k + 1, k));
            cs[k] = denom > 0 ? H(k, k) / denom : 1.0;
            sn[k] = denom > 0 ? H(k + 1, k) / denom : 0.0;
            H(k, k) = denom;
            H(k + 1, k) = 0.0;
            g(k + 1) = -sn[k] * g(k);
            g(k) = cs[k] * g(k);
            if (happy || std::abs(g(k + 1)) <= target) {
                ++k;
                ++total;
                break;
            }
        }

        // Back-substitute y and update x += V y.
        Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = g(i);
            for (int j = i + 1; j < k; ++j) s -= H(i, j) * y(j);
            y(i) = s / H(i, i);
        }
        for (int i = 0; i < k; ++i) axpy(y(i), V[i], x);

        if (std::abs(g(k)) <= target) {
            st.converged = true;
            st.iterations = total;
            st.residual = std::abs(g(k)) / (bnorm > 0 ? bnorm : 1.0);
            return;
        }
    }
    st.iterations = total;
    st.converged = false;
}

SolverLogFn& solver_log() {
    static SolverLogFn fn;
    return fn;
}

template <class Field, class Op>
SolveStats krylov_impl(const Op& A, const Field& b, Field& x, const KrylovConfig& cfg) {
    SolveStats st;
    if (cfg.try_cg) {
        if (cg(A, b, x, cfg, st)) return st;
        if (st.converged) return st;
        SURFNS_INFO("cg did not converge (%d its), switching to gmres(%d)", st.iterations,
                    cfg.restart);
        st.method = "cg";
    }
    gmres(A, b, x, cfg, st);
    return st;
}

} // namespace

void set_solver_log(SolverLogFn fn) { solver_log() = std::move(fn); }

SolveStats krylov_solve(const ScalarOp& A, const ScalarField& b, ScalarField& x,
                        const KrylovConfig& cfg) {
    return krylov_impl(A, b, x, cfg);
}

SolveStats krylov_solve(const VectorOp& A, const TangentField& b, TangentField& x,
                        const KrylovConfig& cfg) {
    return krylov_impl(A, b, x, cfg);
}

ScalarField poisson_solve(const ScalarField& f, const KrylovConfig& cfg, SolveStats* stats,
                          const ScalarField* guess) {
    ScalarField b = f;
    if (!b.halos_valid) halo_exchange(b);
    remove_mean(b);
    scale(b, -1.0);

    // Mean projection keeps the iteration on the complement of the constant
    // nullspace; the projected negative Laplacian is positive definite there.
    ScalarOp A = [](const ScalarField& v) {
        ScalarField w = laplace_beltrami(v);
        scale(w, -1.0);
        remove_mean(w);
        return w;
    };

    // Chart interpolation breaks the symmetry of the composed Laplacian badly
    // enough that CG never converges on it; go straight to GMRES.
    KrylovConfig pc = cfg;
    pc.try_cg = false;

    ScalarField x = guess ? *guess : zeros_like(b);
    if (!x.halos_valid) halo_exchange(x);
    remove_mean(x);
    SolveStats st = krylov_solve(A, b, x, pc);
    if (!st.converged)
        throw numerical_error("poisson_solve: no convergence after " +
                              std::to_string(st.iterations) +
                              " iterations (residual " + std::to_string(st.residual) + ")");
    remove_mean(x);
    if (solver_log()) solver_log()("poisson", st);
    if (stats) *stats = st;
    return x;
}

TangentField diffusion_solve(const TangentField& b, double a, const KrylovConfig& cfg,
                             SolveStats* stats, const TangentField* guess, bool with_curvature) {
    if (a < 0) throw config_error("diffusion_solve: negative coefficient");
    TangentField rhs = b;
    if (!rhs.halos_valid) halo_exchange(rhs);

    VectorOp A = [a, with_curvature](const TangentField& v) {
        TangentField w = bochner_laplacian(v);
        if (with_curvature) axpy(1.0, curvature_op(v), w);
        scale(w, -a);
        axpy(1.0, v, w);
        return w;
    };

    // CG is sound only on a single periodic chart, where no interpolation
    // enters the operator; multi-chart composition needs GMRES from the start.
    KrylovConfig dc = cfg;
    dc.try_cg = cfg.try_cg && rhs.atlas->n_charts() == 1;

    TangentField x = guess ? *guess : zeros_like(rhs);
    if (!x.halos_valid) halo_exchange(x);
    SolveStats st = krylov_solve(A, rhs, x, dc);
    if (!st.converged)
        throw numerical_error("diffusion_solve: no convergence after " +
                              std::to_string(st.iterations) +
                              " iterations (residual " + std::to_string(st.residual) + ")");
    if (solver_log()) solver_log()("diffusion", st);
    if (stats) *stats = st;
    return x;
}

} // namespace surfns
