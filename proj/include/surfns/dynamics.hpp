#pragma once

#include <functional>
#include <vector>

#include "surfns/helmholtz.hpp"

namespace surfns {

enum class Scheme {
    imex1, ///< backward Euler diffusion, forward Euler advection
    imex2  ///< Crank-Nicolson diffusion, Adams-Bashforth-2 advection
};

struct SimConfig {
    double mu = 0.05;   ///< surface shear viscosity
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::imex2;
    KrylovConfig krylov;
    int diag_every = 1;      ///< rows of diagnostics per step count
    double cfl_limit = 0.9;  ///< advective CFL above which we warn or shrink
    bool auto_shrink_dt = false;
};

struct SimState {
    TangentField u;
    ScalarField pressure; ///< projection potential / dt of the last step
    double t = 0.0;
    int step = 0;
    double dt = 0.0; ///< current step size (== config dt unless auto-shrunk)

    TangentField n_prev;   ///< explicit term at the previous step (AB2)
    bool have_prev = false;
    ScalarField potential; ///< last projection potential; warm-starts the next solve
};

struct DiagRow {
    int step = 0;
    double t = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;  ///< 2 mu int |D(u)|^2
    double div_residual = 0.0; ///< max |div_h u|
    double dist_to_E = -1.0;   ///< L2 distance to span(killing_basis); -1 if unused
    double dt = 0.0;
};

using DiagCallback = std::function<void(const DiagRow&)>;

/// Kinetic energy 1/2 int |u|^2.
double kinetic_energy(const TangentField& u);
/// Instantaneous dissipation rate 2 mu int |D(u)|^2 = -dE/dt.
double dissipation_rate(const TangentField& u, double mu);

SimState make_state(const TangentField& u0, const SimConfig& cfg);

/// Advances one step. The explicit terms are the advection and the
/// zeroth-order curvature term; the Bochner diffusion is implicit; the
/// pressure comes from the Leray projection potential divided by dt.
void step(SimState& s, const SimConfig& cfg);

/// Runs until t_end; emits a diagnostics row every diag_every steps (always
/// including step 0 and the final step). `killing_basis` (optional,
/// L2-orthonormal) enables the dist_to_E column.
void run(SimState& s, const SimConfig& cfg, const DiagCallback& diag = nullptr,
         const std::vector<TangentField>* killing_basis = nullptr);

/// Solves Delta pi = div(-(u.grad)u + mu (Delta_B + (kappa L - L^2)) u) for
/// the instantaneous pressure of a divergence-free state.
ScalarField recover_pressure(const TangentField& u, double mu, const KrylovConfig& cfg = {});

/// L2 distance from u to the span of an L2-orthonormal basis.
double distance_to_span(const TangentField& u, const std::vector<TangentField>& basis);

} // namespace surfns
