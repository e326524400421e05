#pragma once

#include "surfns/linsolve.hpp"

namespace surfns {

/// Leray projection v -> v - grad (Delta^-1 div v). Because the Poisson
/// operator composes the same discrete div and grad, the projected field is
/// divergence free up to solver tolerance and the projection is idempotent.
/// `potential` receives the zero-mean scalar potential when non-null.
TangentField helmholtz_project(const VectorField& v, const KrylovConfig& cfg = {},
                               SolveStats* stats = nullptr, ScalarField* potential = nullptr);

/// Max nodewise |div_h v| over active nodes.
double divergence_residual(const VectorField& v);

bool is_divergence_free(const VectorField& v, double tol);

} // namespace surfns
