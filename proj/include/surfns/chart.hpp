#pragma once

#include <memory>

#include "surfns/types.hpp"

namespace surfns {

/// Position and first/second parameter derivatives of a chart embedding at
/// one parameter point. Everything downstream (metric, curvature,
/// Christoffel symbols) is assembled from this jet.
struct EmbeddingJet {
    Vec3 x, xu, xv, xuu, xuv, xvv;
};

class Embedding {
public:
    virtual ~Embedding() = default;
    virtual EmbeddingJet jet(double u, double v) const = 0;
    Vec3 position(double u, double v) const { return jet(u, v).x; }
};

/// x(u,v) = A * (sin u cos v, sin u sin v, cos u). With A = R*rot this is a
/// sphere chart, with A = diag(a,b,c)*rot an ellipsoid chart; rot selects the
/// Yin or Yang copy of the latitude-longitude patch.
class SphericalChartEmbedding final : public Embedding {
public:
    explicit SphericalChartEmbedding(const Mat3& A) : A_(A) {}
    EmbeddingJet jet(double u, double v) const override;

private:
    Mat3 A_;
};

/// Torus of revolution about e3: x = ((R + r cos v) cos u, (R + r cos v) sin u, r sin v).
class TorusEmbedding final : public Embedding {
public:
    TorusEmbedding(double R, double r) : R_(R), r_(r) {}
    EmbeddingJet jet(double u, double v) const override;

private:
    double R_, r_;
};

/// Uniform parameter grid of one chart. Interior nodes carry the surface
/// data; `halo` extra rings on every side hold values copied (periodic wrap)
/// or interpolated (partner chart) by halo exchange.
struct Chart {
    int n1 = 0, n2 = 0; ///< interior node counts
    int halo = 0;       ///< halo ring width
    bool periodic1 = false, periodic2 = false;
    double u0 = 0, v0 = 0; ///< parameters of full-grid node (0,0)
    double h1 = 0, h2 = 0;
    const Embedding* embedding = nullptr;

    int N1() const { return n1 + 2 * halo; }
    int N2() const { return n2 + 2 * halo; }
    int size() const { return N1() * N2(); }
    int idx(int i, int j) const { return i * N2() + j; }
    double u(int i) const { return u0 + i * h1; }
    double v(int j) const { return v0 + j * h2; }
    bool is_interior(int i, int j) const {
        return i >= halo && i < halo + n1 && j >= halo && j < halo + n2;
    }
};

} // namespace surfns
