#pragma once

#include <cstdint>
#include <vector>

#include "surfns/dynamics.hpp"

namespace surfns {

struct KillingConfig {
    int probes = 8;      ///< subspace dimension, must exceed the expected kernel
    int max_sweeps = 80; ///< filter applications per probe
    double shift = 2.0;  ///< c in the smoothing filter (I - c (Delta_B + kappa L - L^2))^{-1};
                         ///< keep below 3 so the operator stays definite on the
                         ///< supported surfaces
    std::uint64_t seed = 42;
    KrylovConfig krylov;
};

/// Output of the equilibrium-manifold search. `quotients` holds the strain
/// Rayleigh quotients int |D(y)|^2 of the L2-orthonormal probe basis in
/// ascending order; entries below `threshold` span the Killing space.
struct KillingResult {
    std::vector<TangentField> basis; ///< accepted (Killing) fields only
    std::vector<double> quotients;
    double threshold = 0.0;
    double gap = 0.0; ///< quotient separation accepted/rejected
    int sweeps = 0;
    int dim() const { return static_cast<int>(basis.size()); }
};

/// Finds the strain-free divergence-free fields by subspace iteration with
/// the filter P_H (I - c Delta_B)^{-1}, then classifies the limit basis by
/// its strain quotient spectrum (kernel: sphere 3, torus 1, ellipsoid 0).
KillingResult killing_fields(const SurfaceAtlas& atlas, const KillingConfig& cfg = {});

struct StabilityConfig {
    double eps = 0.01; ///< perturbation amplitude relative to |X|
    double mu = 2.0;
    double dt = 5e-3;
    double t_end = 1.5;
    Scheme scheme = Scheme::imex2;
    std::uint64_t seed = 43;
    KrylovConfig krylov;
    int diag_every = 5;
    double fit_hi = 1e-2; ///< fit window, relative to |u0|
    double fit_lo = 1e-6;
};

struct StabilityResult {
    std::vector<double> times, dists; ///< sampled distance to the Killing span
    double u0_norm = 0.0;
    double rate = 0.0;      ///< d/dt log dist from the log-linear fit
    double intercept = 0.0; ///< log10 dist at t = 0 from the fit
    double r2 = 0.0;
    double decades = 0.0;        ///< decades of decay covered by the fit window
    double terminal_ratio = 0.0; ///< dist(T) / |u0|
    std::vector<double> terminal_coeffs; ///< <u(T), X_i> onto the Killing basis
};

/// Perturbs the first Killing field by eps * (normalized divergence-free
/// noise) and integrates; the distance to the equilibrium manifold must decay
/// log-linearly at the viscous rate.
StabilityResult stability_experiment(const std::vector<TangentField>& basis,
                                     const StabilityConfig& cfg,
                                     const DiagCallback& diag = nullptr);

} // namespace surfns
