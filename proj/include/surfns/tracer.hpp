#pragma once

#include <vector>

#include "surfns/fields.hpp"

namespace surfns {

/// Bicubic Lagrange interpolation of a field at an arbitrary surface point.
/// Vector samples are re-projected onto the tangent plane of the evaluation
/// point when the field is tangential.
double sample_scalar(const ScalarField& f, const ChartPoint& p);
Vec3 sample_vector(const VectorField& f, const ChartPoint& p);

/// Convenience wrappers resolving the owning chart by closest-point search.
double sample_scalar(const ScalarField& f, const Vec3& x);
Vec3 sample_vector(const VectorField& f, const Vec3& x);

struct TracerConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 1; ///< store every k-th step
};

struct Streamline {
    std::vector<double> times;
    std::vector<Vec3> points;
    double closure = -1.0; ///< |x(T) - x(0)|, meaningful for periodic orbits
};

/// Integrates dx/dt = u(x) by classical RK4 in the ambient space with a
/// closest-point reprojection after every stage and step.
Streamline trace_streamline(const TangentField& u, const Vec3& x0, const TracerConfig& cfg);

struct BernoulliReport {
    double e0 = 0.0;     ///< 1/2 |u|^2 + pi at the first sample
    double max_dev = 0.0; ///< max |E(s) - E(0)| along the path
    double max_abs_e = 0.0;
};

/// Evaluates the Bernoulli function E = 1/2 |u|^2 + pi along a path; for a
/// stationary solution E is constant along streamlines.
BernoulliReport bernoulli_check(const TangentField& u, const ScalarField& pressure,
                                const std::vector<Vec3>& path);

} // namespace surfns
