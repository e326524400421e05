#pragma once

#include "surfns/fields.hpp"

namespace surfns {

/// Coefficients of the fourth-order centered first-derivative stencil,
/// f'(0) ~ (c1 (f_{+1}-f_{-1}) + c2 (f_{+2}-f_{-2})) / h.
struct StencilPlan {
    double c1 = 2.0 / 3.0;
    double c2 = -1.0 / 12.0;
};

StencilPlan& stencil_plan();

namespace testing {
/// Negative-control hook: perturbs one stencil coefficient so that identity
/// checks fail; used to prove the verification suite can detect defects.
void corrupt_stencil(double eps);
void reset_stencil();
} // namespace testing

/// grad phi = (d_i phi) tau^i  (tangent by construction)
TangentField surface_gradient(const ScalarField& phi);

/// Ambient surface gradient tensor: grad u = sum_i tau^i (d_i u)^T.
Mat3Field full_gradient(const VectorField& u);

/// div u = (tau^i | d_i u); valid for tangential and general ambient fields.
ScalarField surface_divergence(const VectorField& u);

/// Covariant derivative along chart direction dir (0 or 1): P d_dir u.
TangentField covariant_derivative(const VectorField& u, int dir);
/// Same in chart components, (d_dir u^j + Lam^j_{dir k} u^k) tau_j; kept as an
/// independent cross-check of the extrinsic path.
TangentField covariant_derivative_intrinsic(const VectorField& u, int dir);

/// Surface rate-of-strain D(u) = 1/2 P (grad u + grad u^T) P.
SymTensorField strain(const VectorField& u);

/// Tensor divergence (d_i T)^T tau^i (ambient vector, not projected).
VectorField div_symtensor(const Mat3Field& T);

/// Bochner Laplacian g^{ij}(nabla_i nabla_j - Lam^k_{ij} nabla_k) u.
TangentField bochner_laplacian(const VectorField& u);

/// Zeroth-order curvature term (kappa L - L^2) u; equals gauss * u on
/// tangential u in two dimensions.
TangentField curvature_op(const VectorField& u);

/// laplace_beltrami = surface_divergence(surface_gradient(phi)); composing
/// the identical stencils makes the Helmholtz projection an exact discrete
/// identity.
ScalarField laplace_beltrami(const ScalarField& phi);

enum class StokesRoute {
    div_strain, ///< 2 mu P div D(u)
    decomposed  ///< mu (Delta u + grad div u + (kappa L - L^2) u)
};

/// Viscous right-hand side; both routes realise the same operator and their
/// mismatch is a discretisation-accuracy diagnostic.
TangentField stokes_rhs(const VectorField& u, double mu, StokesRoute route);

/// P ((grad u)^T u), the tangential self-advection term.
TangentField advection(const VectorField& u);

} // namespace surfns
