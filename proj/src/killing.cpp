#include "surfns/killing.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>

#include "surfns/calculus.hpp"
#include "surfns/errors.hpp"
#include "surfns/log.hpp"
#include "surfns/random_fields.hpp"

namespace surfns {

namespace {

// Modified Gram-Schmidt in the quadrature inner product.
void orthonormalize(std::vector<TangentField>& V) {
    for (std::size_t i = 0; i < V.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) axpy(-inner_l2(V[i], V[j]), V[j], V[i]);
        const double n = norm_l2(V[i]);
        if (!(n > 0)) throw numerical_error("killing_fields: degenerate probe basis");
        scale(V[i], 1.0 / n);
    }
}

// Strain quotient matrix S_ij = int D(V_i) : D(V_j).
Eigen::MatrixXd strain_gram(const std::vector<TangentField>& V) {
    const int p = static_cast<int>(V.size());
    std::vector<SymTensorField> D;
    D.reserve(p);
    for (const TangentField& v : V) D.push_back(strain(v));
    Eigen::MatrixXd S(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) S(i, j) = S(j, i) = inner_l2(D[i], D[j]);
    return S;
}

} // namespace

KillingResult killing_fields(const SurfaceAtlas& atlas, const KillingConfig& cfg) {
    if (cfg.probes < 2) throw config_error("killing_fields: need at least 2 probes");

    std::vector<TangentField> V;
    V.reserve(cfg.probes);
    for (int i = 0; i < cfg.probes; ++i) {
        TangentField v = random_tangent_field(atlas, cfg.seed + static_cast<std::uint64_t>(i));
        V.push_back(helmholtz_project(v, cfg.krylov));
    }
    orthonormalize(V);

    const double h = atlas.max_spacing();
    Eigen::VectorXd prev_q;
    int sweeps = 0;
    for (; sweeps < cfg.max_sweeps; ++sweeps) {
        for (TangentField& v : V) {
            // The curvature term makes strain-free fields exact fixed points
            // of the solve, so the iteration separates them from the rest of
            // the low spectrum even where Bochner eigenvalues cluster.
            TangentField s = diffusion_solve(v, cfg.shift, cfg.krylov, nullptr, &v, true);
            v = helmholtz_project(s, cfg.krylov);
        }
        orthonormalize(V);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(strain_gram(V));
        const Eigen::VectorXd q = es.eigenvalues();
        SURFNS_DEBUG("killing sweep %d quotients [%.3e .. %.3e]", sweeps + 1, q(0),
                     q(q.size() - 1));
        if (prev_q.size() == q.size() && sweeps >= 4) {
            // Quotients already under the acceptance threshold have landed;
            // everything else must have stopped moving on a log scale. On
            // surfaces with tightly spaced low modes a candidate can creep
            // down for tens of sweeps, so an overall-movement test alone
            // would quit mid-descent.
            const double thr = std::max(1e-6 * q(q.size() - 1), 10.0 * std::pow(h, 6));
            double move = 0;
            for (int i = 0; i < q.size(); ++i) {
                if (q(i) < thr) continue;
                const double a = std::max(q(i), 1e-300), b = std::max(prev_q(i), 1e-300);
                move = std::max(move, std::abs(std::log(a / b)));
            }
            if (move < 0.02) {
                ++sweeps;
                prev_q = q;
                break;
            }
        }
        prev_q = q;
    }

    // Rotate the basis into strain eigenvectors and classify.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(strain_gram(V));
    const Eigen::VectorXd q = es.eigenvalues();
    const Eigen::MatrixXd Y = es.eigenvectors();
    const int p = static_cast<int>(V.size());

    std::vector<TangentField> rotated;
    rotated.reserve(p);
    for (int k = 0; k < p; ++k) {
        TangentField y = V[0];
        scale(y, Y(0, k));
        for (int j = 1; j < p; ++j) axpy(Y(j, k), V[j], y);
        rotated.push_back(std::move(y));
    }

    KillingResult res;
    res.sweeps = sweeps;
    res.quotients.assign(q.data(), q.data() + p);
    res.threshold = std::max(1e-6 * q(p - 1), 10.0 * std::pow(h, 6));

    int dim = 0;
    while (dim < p && q(dim) < res.threshold) ++dim;
    if (dim == p)
        throw numerical_error("killing_fields: every probe looks strain-free; "
                              "increase probes or resolution");
    res.gap = dim > 0 ? q(dim) / std::max(q(dim - 1), 1e-300) : q(0) / res.threshold;
    for (int k = 0; k < dim; ++k) res.basis.push_back(std::move(rotated[k]));

    SURFNS_INFO("killing_fields: dim=%d threshold=%.3e gap=%.3e sweeps=%d", dim, res.threshold,
                res.gap, sweeps);
    return res;
}

StabilityResult stability_experiment(const std::vector<TangentField>& basis,
                                     const StabilityConfig& cfg, const DiagCallback& diag) {
    if (basis.empty()) throw config_error("stability_experiment: empty Killing basis");
    const SurfaceAtlas& atlas = *basis[0].atlas;

    TangentField w = helmholtz_project(random_tangent_field(atlas, cfg.seed), cfg.krylov);
    const double xnorm = norm_l2(basis[0]);
    scale(w, xnorm / norm_l2(w));

    TangentField u0 = basis[0];
    axpy(cfg.eps, w, u0);

    SimConfig sim;
    sim.mu = cfg.mu;
    sim.dt = cfg.dt;
    sim.t_end = cfg.t_end;
    sim.scheme = cfg.scheme;
    sim.krylov = cfg.krylov;
    sim.diag_every = cfg.diag_every;

    StabilityResult res;
    res.u0_norm = norm_l2(u0);

    SimState state = make_state(u0, sim);
    run(state, sim,
        [&](const DiagRow& row) {
            res.times.push_back(row.t);
            res.dists.push_back(row.dist_to_E);
            if (diag) diag(row);
        },
        &basis);

    // Log-linear fit of the decay inside the requested window.
    const double hi = cfg.fit_hi * res.u0_norm, lo = cfg.fit_lo * res.u0_norm;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int m = 0;
    double dmin = std::numeric_limits<double>::max(), dmax = 0;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        const double d = res.dists[i];
        if (d < lo || d > hi) continue;
        const double x = res.times[i], y = std::log10(d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (m >= 3) {
        const double det = m * sxx - sx * sx;
        const double slope = (m * sxy - sx * sy) / det;
        res.intercept = (sy * sxx - sx * sxy) / det;
        res.rate = slope * std::log(10.0);
        double ss_res = 0, ss_tot = 0;
        const double ybar = sy / m;
        for (std::size_t i = 0; i < res.times.size(); ++i) {
            const double d = res.dists[i];
            if (d < lo || d > hi) continue;
            const double y = std::log10(d);
            const double yhat = res.intercept + slope * res.times[i];
            ss_res += (y - yhat) * (y - yhat);
            ss_tot += (y - ybar) * (y - ybar);
        }
        res.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
        res.decades = std::log10(dmax / dmin);
    }
    res.terminal_ratio = res.dists.empty() ? 0.0 : res.dists.back() / res.u0_norm;
    for (const TangentField& X : basis) res.terminal_coeffs.push_back(inner_l2(state.u, X));
    return res;
}

} // namespace surfns
