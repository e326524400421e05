#include "surfns/helmholtz.hpp"

#include <utility>

#include "surfns/calculus.hpp"

namespace surfns {

TangentField helmholtz_project(const VectorField& v, const KrylovConfig& cfg, SolveStats* stats,
                               ScalarField* potential) {
    TangentField u = v;
    if (!u.tangent) project_tangent(u);
    halo_exchange(u);

    // A caller-supplied potential doubles as the warm start; timestepping
    // passes the previous step's potential, which changes by O(dt).
    const ScalarField* guess =
        (potential && !potential->data.empty() && potential->atlas == u.atlas) ? potential
                                                                               : nullptr;
    ScalarField d = surface_divergence(u);

    // Below tol * |u| the divergence is roundoff noise (re-projections of
    // already divergence-free fields); the floor keeps the solver from
    // chasing tol * |noise|, which restarted GMRES cannot reach. The unit
    // length scale of the supported geometries is absorbed into the factor.
    KrylovConfig pc = cfg;
    pc.abs_tol = std::max(cfg.abs_tol, cfg.tol * norm_l2(u));

    ScalarField phi = poisson_solve(d, pc, stats, guess);
    TangentField g = surface_gradient(phi);
    axpy(-1.0, g, u);
    u.tangent = true;
    if (potential) *potential = std::move(phi);
    return u;
}

double divergence_residual(const VectorField& v) {
    VectorField w = v;
    if (!w.halos_valid) halo_exchange(w);
    return max_abs(surface_divergence(w));
}

bool is_divergence_free(const VectorField& v, double tol) {
    return divergence_residual(v) <= tol;
}

} // namespace surfns
