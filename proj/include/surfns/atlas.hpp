#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "surfns/chart.hpp"
#include "surfns/types.hpp"

namespace surfns {

enum class SurfaceKind { sphere, torus, ellipsoid };

const char* kind_name(SurfaceKind kind);

/// Per-node geometric data precomputed from the chart embedding. Conventions:
/// nu is the outward unit normal, l_ij = (x_ij | nu), kappa = tr(g^{-1} l)
/// (unit sphere: -2), gauss = det l / det g.
struct GeometryCache {
    std::vector<Vec3> x;            ///< node positions
    std::vector<Vec3> tau1, tau2;   ///< coordinate tangent basis
    std::vector<Vec3> dual1, dual2; ///< dual basis tau^i = g^{ij} tau_j
    std::vector<Vec3> nu;
    std::vector<double> g11, g12, g22;
    std::vector<double> gi11, gi12, gi22;
    std::vector<double> sqrtg;
    std::vector<double> l11, l12, l22;           ///< second fundamental form
    std::vector<double> lm11, lm12, lm21, lm22;  ///< mixed form l^i_j
    std::vector<double> kappa;
    std::vector<double> gauss;
    std::vector<double> c111, c112, c122; ///< Christoffel Lam^1_{ij}, ij sym
    std::vector<double> c211, c212, c222; ///< Christoffel Lam^2_{ij}
    std::vector<double> pou;              ///< partition-of-unity weight
    std::vector<uint8_t> interior;

    /// Tangential projector I - nu nu^T.
    Mat3 projector(int k) const {
        return Mat3::Identity() - nu[k] * nu[k].transpose();
    }
    /// Weingarten map as an ambient 3x3 matrix, W tau_j = l_ij tau^i, W nu = 0.
    Mat3 weingarten(int k) const {
        return l11[k] * dual1[k] * dual1[k].transpose() +
               l12[k] * (dual1[k] * dual2[k].transpose() + dual2[k] * dual1[k].transpose()) +
               l22[k] * dual2[k] * dual2[k].transpose();
    }
    bool active(int k) const { return interior[k] && pou[k] > 0.0; }
};

/// One halo node of a two-chart atlas: filled by 6x6 tensor-Lagrange
/// interpolation from the partner chart's interior grid.
struct HaloTarget {
    int node;       ///< receptor index in its own chart
    int di, dj;     ///< base full-grid index of the donor stencil
    std::array<double, 6> wu, wv;
};

struct SurfaceAtlas {
    SurfaceKind kind;
    double radius = 0;            ///< sphere
    double R = 0, r = 0;          ///< torus
    double a = 0, b = 0, c = 0;   ///< ellipsoid
    int resolution = 0;

    std::vector<std::unique_ptr<Embedding>> embeddings;
    std::vector<Chart> charts;
    std::vector<GeometryCache> geom;
    std::vector<std::vector<HaloTarget>> halo_plan; ///< empty for periodic charts
    double area = 0;

    int n_charts() const { return static_cast<int>(charts.size()); }
    /// Coarsest grid spacing, used for resolution-dependent thresholds.
    double max_spacing() const;
    /// Finest physical node spacing min(h1 |tau1|, h2 |tau2|), used for CFL.
    double min_spacing() const;
};

/// Torus of revolution, major radius R, minor radius r (requires R > r > 0),
/// single doubly-periodic chart with n_u x n_v interior nodes (>= 16, even).
SurfaceAtlas build_torus(double R, double r, int n_u, int n_v);

/// Sphere of given radius as a two-chart overlapping Yin-Yang atlas; n >= 16
/// interior nodes across the latitude band of each chart.
SurfaceAtlas build_sphere(double radius, int n);

/// Ellipsoid with semi-axes a, b, c on the scaled Yin-Yang atlas.
SurfaceAtlas build_ellipsoid(double a, double b, double c, int n);

/// Worst nodewise residuals of the cached geometric identities; all four are
/// also enforced (with throwing thresholds) when the atlas is built.
struct GeometryResiduals {
    double duality = 0;     ///< (tau^i | tau_j) - delta^i_j
    double unit_normal = 0; ///< |nu| - 1
    double weingarten = 0;  ///< l_ij + (tau_i | d_j nu)
    double curvature = 0;   ///< kappa W - W^2 - gauss * P
};

GeometryResiduals geometry_residuals(const SurfaceAtlas& atlas);

/// Surface point in chart coordinates.
struct ChartPoint {
    int chart;
    double u, v;
};

Vec3 position(const SurfaceAtlas& atlas, const ChartPoint& p);

/// Partition-of-unity weight of one chart at arbitrary chart parameters.
double pou_weight_at(const SurfaceAtlas& atlas, int chart, double u, double v);

/// Parameters of the same surface point in the other chart of a two-chart
/// atlas (the chart transition map).
ChartPoint partner_point(const SurfaceAtlas& atlas, int chart, double u, double v);

/// Closest surface point to an ambient point y (analytic for sphere/torus,
/// damped Newton for the ellipsoid). Returns coordinates in the chart whose
/// partition-of-unity weight at the foot point is largest (ties: lower chart
/// index). Throws numerical_error when y lies outside the projection tube.
ChartPoint closest_point(const SurfaceAtlas& atlas, const Vec3& y);

} // namespace surfns
