#include "surfns/dynamics.hpp"

#include <cmath>
#include <utility>

#include "surfns/calculus.hpp"
#include "surfns/errors.hpp"
#include "surfns/log.hpp"

namespace surfns {

namespace {

/// Explicit right-hand side N(u) = -P((grad u)^T u) + mu (kappa L - L^2) u.
TangentField explicit_rhs(const TangentField& u, double mu) {
    TangentField adv = advection(u);
    TangentField curv = curvature_op(u);
    scale(curv, mu);
    axpy(-1.0, adv, curv);
    return curv;
}

double advective_cfl(const SimState& s, const SurfaceAtlas& atlas) {
    return max_norm(s.u) * s.dt / atlas.min_spacing();
}

} // namespace

double kinetic_energy(const TangentField& u) { return 0.5 * inner_l2(u, u); }

double dissipation_rate(const TangentField& u, double mu) {
    SymTensorField D = strain(u);
    return 2.0 * mu * inner_l2(D, D);
}

SimState make_state(const TangentField& u0, const SimConfig& cfg) {
    SimState s;
    s.u = u0;
    if (!s.u.tangent) project_tangent(s.u);
    if (!s.u.halos_valid) halo_exchange(s.u);
    s.pressure = make_scalar(*u0.atlas);
    s.pressure.halos_valid = true;
    s.dt = cfg.dt;
    return s;
}

void step(SimState& s, const SimConfig& cfg) {
    const double mu = cfg.mu;
    const double dt = s.dt;
    const bool cn = cfg.scheme == Scheme::imex2 && s.have_prev;

    TangentField n_now = explicit_rhs(s.u, mu);

    // rhs = u + dt * (explicit combination) [+ dt mu/2 Delta u for CN]
    TangentField rhs = s.u;
    if (cn) {
        axpy(1.5 * dt, n_now, rhs);
        axpy(-0.5 * dt, s.n_prev, rhs);
        TangentField lap = bochner_laplacian(s.u);
        axpy(0.5 * dt * mu, lap, rhs);
    } else {
        axpy(dt, n_now, rhs);
    }

    // The first second-order step has no AB2 history and falls back to
    // backward Euler, which needs the full implicit coefficient.
    const double a = (cn ? 0.5 : 1.0) * dt * mu;
    SolveStats dstats;
    TangentField ustar = diffusion_solve(rhs, a, cfg.krylov, &dstats, &s.u);

    SolveStats pstats;
    ScalarField phi = std::move(s.potential); // empty on the first step
    s.u = helmholtz_project(ustar, cfg.krylov, &pstats, &phi);
    s.potential = phi;
    scale(phi, 1.0 / dt);
    s.pressure = std::move(phi);

    s.n_prev = std::move(n_now);
    s.have_prev = true;
    s.t += dt;
    s.step += 1;
    SURFNS_DEBUG("step %d t=%.6f diffusion %s %d its, poisson %s %d its", s.step, s.t,
                 dstats.method.c_str(), dstats.iterations, pstats.method.c_str(),
                 pstats.iterations);
}

void run(SimState& s, const SimConfig& cfg, const DiagCallback& diag,
         const std::vector<TangentField>* killing_basis) {
    const SurfaceAtlas& atlas = *s.u.atlas;
    if (s.dt <= 0) s.dt = cfg.dt;
    if (cfg.dt <= 0 || cfg.t_end < 0) throw config_error("run: dt and t_end must be positive");

    bool warned = false;
    auto emit = [&] {
        if (!diag) return;
        DiagRow row;
        row.step = s.step;
        row.t = s.t;
        row.energy = kinetic_energy(s.u);
        row.dissipation = dissipation_rate(s.u, cfg.mu);
        row.div_residual = max_abs(surface_divergence(s.u));
        if (killing_basis) row.dist_to_E = distance_to_span(s.u, *killing_basis);
        row.dt = s.dt;
        diag(row);
    };

    emit();
    const double t_final = cfg.t_end;
    while (s.t < t_final - 1e-12 * std::max(1.0, t_final)) {
        // land exactly on t_end
        if (s.t + s.dt > t_final) s.dt = t_final - s.t;

        const double cfl = advective_cfl(s, atlas);
        if (cfl > cfg.cfl_limit) {
            if (cfg.auto_shrink_dt) {
                const double shrink = cfg.cfl_limit / cfl * 0.9;
                s.dt *= shrink;
                SURFNS_WARN("advective CFL %.2f exceeds %.2f; dt shrunk to %.3e", cfl,
                            cfg.cfl_limit, s.dt);
            } else if (!warned) {
                SURFNS_WARN("advective CFL %.2f exceeds %.2f; results may be unstable", cfl,
                            cfg.cfl_limit);
                warned = true;
            }
        }

        step(s, cfg);

        if (!all_finite(s.u))
            throw numerical_error("run: non-finite velocity at step " + std::to_string(s.step));
        if (s.step % std::max(1, cfg.diag_every) == 0 || s.t >= t_final - 1e-12) emit();
    }
}

ScalarField recover_pressure(const TangentField& u, double mu, const KrylovConfig& cfg) {
    TangentField v = u;
    if (!v.halos_valid) halo_exchange(v);
    TangentField f = bochner_laplacian(v);
    TangentField curv = curvature_op(v);
    axpy(1.0, curv, f);
    scale(f, mu);
    TangentField adv = advection(v);
    axpy(-1.0, adv, f);
    return poisson_solve(surface_divergence(f), cfg);
}

double distance_to_span(const TangentField& u, const std::vector<TangentField>& basis) {
    TangentField r = u;
    for (const TangentField& X : basis) axpy(-inner_l2(r, X), X, r);
    return norm_l2(r);
}

} // namespace surfns
