#pragma once

#include <functional>
#include <string>

#include "surfns/fields.hpp"

namespace surfns {

struct KrylovConfig {
    double tol = 1e-10;   ///< relative residual target
    int max_iter = 5000;  ///< operator applications
    int restart = 100;    ///< GMRES restart length
    bool try_cg = true;   ///< attempt CG before GMRES when the operator warrants it
    double abs_tol = 0.0; ///< absolute residual floor; callers set it to the level
                          ///< below which the RHS is roundoff noise
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0; ///< final relative residual
    bool converged = false;
    std::string method;
};

using ScalarOp = std::function<ScalarField(const ScalarField&)>;
using VectorOp = std::function<TangentField(const TangentField&)>;

/// Conjugate gradients in the quadrature inner product; falls back to
/// restarted GMRES when CG stalls on the only-approximately-symmetric
/// discrete operators. `x` carries the initial guess.
SolveStats krylov_solve(const ScalarOp& A, const ScalarField& b, ScalarField& x,
                        const KrylovConfig& cfg);
SolveStats krylov_solve(const VectorOp& A, const TangentField& b, TangentField& x,
                        const KrylovConfig& cfg);

/// Solves Delta_h pi = f on the zero-mean subspace (f is mean-projected, the
/// operator re-projected every iteration). Returns the zero-mean potential;
/// `guess` warm-starts the iteration when provided.
ScalarField poisson_solve(const ScalarField& f, const KrylovConfig& cfg = {},
                          SolveStats* stats = nullptr, const ScalarField* guess = nullptr);

/// Solves (I - a Delta_B) u = b for tangential u, a >= 0; `guess` warm-starts
/// the iteration when provided. With `with_curvature` the operator becomes
/// I - a (Delta_B + (kappa L - L^2)), whose fixed points at any a are exactly
/// the strain-free fields; the smoothing filter in the equilibrium search
/// relies on that.
TangentField diffusion_solve(const TangentField& b, double a, const KrylovConfig& cfg = {},
                             SolveStats* stats = nullptr, const TangentField* guess = nullptr,
                             bool with_curvature = false);

/// Optional observer invoked once per completed poisson/diffusion solve with
/// the solve kind ("poisson" or "diffusion") and its stats; pass nullptr to
/// disable. Used by the CLI's solvers.csv log.
using SolverLogFn = std::function<void(const char* kind, const SolveStats&)>;
void set_solver_log(SolverLogFn fn);

} // namespace surfns
