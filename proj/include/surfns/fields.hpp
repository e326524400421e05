#pragma once

#include <vector>

#include "surfns/atlas.hpp"
#include "surfns/types.hpp"

namespace surfns {

/// Fields store one value per grid node of every chart (halo rings included).
/// Mutating arithmetic keeps halos valid when all inputs had valid halos;
/// anything else must call halo_exchange before a stencil touches the field.
struct ScalarField {
    const SurfaceAtlas* atlas = nullptr;
    std::vector<std::vector<double>> data;
    bool halos_valid = false;
};

struct VectorField {
    const SurfaceAtlas* atlas = nullptr;
    std::vector<std::vector<Vec3>> data;
    bool halos_valid = false;
    bool tangent = false; ///< halo exchange re-projects tangential fields
};

/// Tangent vector fields are ambient 3-vectors with (nu | u) = 0 nodewise.
using TangentField = VectorField;

struct Mat3Field {
    const SurfaceAtlas* atlas = nullptr;
    std::vector<std::vector<Mat3>> data;
    bool halos_valid = false;
    bool tangential = false; ///< halo exchange re-applies P T P
};

/// Symmetric tangential 3x3 tensors (P T P = T); stored as full matrices,
/// serialised as 6 components.
using SymTensorField = Mat3Field;

ScalarField make_scalar(const SurfaceAtlas& atlas);
VectorField make_vector(const SurfaceAtlas& atlas, bool tangent = false);
TangentField make_tangent(const SurfaceAtlas& atlas);
Mat3Field make_mat3(const SurfaceAtlas& atlas, bool tangential = false);

/// axis x position, the generator of the rotation about `axis`; tangential
/// (to roundoff) on surfaces of revolution about that axis, ambient
/// otherwise. Callers needing a tangent field should project.
VectorField rotation_field(const SurfaceAtlas& atlas, const Vec3& axis);

/// Refreshes halo nodes: periodic wrap on the torus chart, partner-chart
/// interpolation on two-chart atlases (tangent fields are re-projected at the
/// receiving node, tangential tensors re-sandwiched).
void halo_exchange(ScalarField& f);
void halo_exchange(VectorField& f);
void halo_exchange(Mat3Field& f);

/// Throws when a stencil consumer would read stale halos; `who` names the
/// offending operator in the error message.
void require_halos(const ScalarField& f, const char* who = "operator");
void require_halos(const VectorField& f, const char* who = "operator");
void require_halos(const Mat3Field& f, const char* who = "operator");

/// Partition-of-unity weighted quadrature over the surface.
double integrate_scalar(const ScalarField& f);
double inner_l2(const ScalarField& a, const ScalarField& b);
double inner_l2(const VectorField& a, const VectorField& b);
/// Frobenius inner product of tensor fields, integrated.
double inner_l2(const Mat3Field& a, const Mat3Field& b);
double norm_l2(const ScalarField& a);
double norm_l2(const VectorField& a);
double norm_l2(const Mat3Field& a);

/// y += alpha * x
void axpy(double alpha, const ScalarField& x, ScalarField& y);
void axpy(double alpha, const VectorField& x, VectorField& y);
void scale(ScalarField& f, double alpha);
void scale(VectorField& f, double alpha);

/// Removes the quadrature mean: f -= (integral f)/|Sigma|.
void remove_mean(ScalarField& f);

/// Nodewise tangential projection u := (I - nu nu^T) u; marks the field tangent.
void project_tangent(VectorField& u);

ScalarField pointwise_dot(const VectorField& a, const VectorField& b);

/// Max over active nodes.
double max_abs(const ScalarField& f);
double max_norm(const VectorField& f);
/// Largest |(nu | u)| over active nodes.
double tangency_residual(const VectorField& u);

bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& f);

} // namespace surfns
