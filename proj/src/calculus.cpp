#include "surfns/calculus.hpp"

#include "surfns/errors.hpp"

namespace surfns {

StencilPlan& stencil_plan() {
    static StencilPlan plan;
    return plan;
}

namespace testing {
void corrupt_stencil(double eps) { stencil_plan().c1 = (2.0 / 3.0) * (1.0 + eps); }
void reset_stencil() { stencil_plan() = StencilPlan{}; }
} // namespace testing

namespace {

// d/du at node k, stride s = N2 (dir 0) or 1 (dir 1).
template <class T>
T deriv(const std::vector<T>& f, int k, int s, double h) {
    const StencilPlan& p = stencil_plan();
    return (p.c1 * (f[k + s] - f[k - s]) + p.c2 * (f[k + 2 * s] - f[k - 2 * s])) / h;
}

} // namespace

TangentField surface_gradient(const ScalarField& phi) {
    require_halos(phi, "surface_gradient");
    const SurfaceAtlas& atlas = *phi.atlas;
    TangentField out = make_tangent(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<double>& f = phi.data[c];
        std::vector<Vec3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                o[k] = deriv(f, k, ch.N2(), ch.h1) * g.dual1[k] +
                       deriv(f, k, 1, ch.h2) * g.dual2[k];
            }
    }
    halo_exchange(out);
    return out;
}

Mat3Field full_gradient(const VectorField& u) {
    require_halos(u, "full_gradient");
    const SurfaceAtlas& atlas = *u.atlas;
    Mat3Field out = make_mat3(atlas, false);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];
        std::vector<Mat3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                const Vec3 d1 = deriv(f, k, ch.N2(), ch.h1);
                const Vec3 d2 = deriv(f, k, 1, ch.h2);
                o[k] = g.dual1[k] * d1.transpose() + g.dual2[k] * d2.transpose();
            }
    }
    halo_exchange(out);
    return out;
}

ScalarField surface_divergence(const VectorField& u) {
    require_halos(u, "surface_divergence");
    const SurfaceAtlas& atlas = *u.atlas;
    ScalarField out = make_scalar(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];
        std::vector<double>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                o[k] = g.dual1[k].dot(deriv(f, k, ch.N2(), ch.h1)) +
                       g.dual2[k].dot(deriv(f, k, 1, ch.h2));
            }
    }
    halo_exchange(out);
    return out;
}

TangentField covariant_derivative(const VectorField& u, int dir) {
    require_halos(u, "covariant_derivative");
    if (dir != 0 && dir != 1) throw config_error("covariant_derivative: dir must be 0 or 1");
    const SurfaceAtlas& atlas = *u.atlas;
    TangentField out = make_tangent(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];
        std::vector<Vec3>& o = out.data[c];
        const int s = dir == 0 ? ch.N2() : 1;
        const double h = dir == 0 ? ch.h1 : ch.h2;
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                const Vec3 d = deriv(f, k, s, h);
                o[k] = d - g.nu[k] * g.nu[k].dot(d);
            }
    }
    halo_exchange(out);
    return out;
}

TangentField covariant_derivative_intrinsic(const VectorField& u, int dir) {
    require_halos(u, "covariant_derivative_intrinsic");
    if (dir != 0 && dir != 1) throw config_error("covariant_derivative_intrinsic: dir must be 0 or 1");
    const SurfaceAtlas& atlas = *u.atlas;
    TangentField out = make_tangent(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];

        // Chart components u^a = (tau^a | u), differentiated as scalars.
        std::vector<double> u1(f.size()), u2(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            u1[k] = g.dual1[k].dot(f[k]);
            u2[k] = g.dual2[k].dot(f[k]);
        }

        std::vector<Vec3>& o = out.data[c];
        const int s = dir == 0 ? ch.N2() : 1;
        const double h = dir == 0 ? ch.h1 : ch.h2;
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                const double du1 = deriv(u1, k, s, h);
                const double du2 = deriv(u2, k, s, h);
                // Lam^j_{dir,k}: index symbols cXab with X = upper index.
                double l11, l12, l21, l22; // l{upper}{lower2}, lower1 = dir
                if (dir == 0) {
                    l11 = g.c111[k]; l12 = g.c112[k];
                    l21 = g.c211[k]; l22 = g.c212[k];
                } else {
                    l11 = g.c112[k]; l12 = g.c122[k];
                    l21 = g.c212[k]; l22 = g.c222[k];
                }
                const double w1 = du1 + l11 * u1[k] + l12 * u2[k];
                const double w2 = du2 + l21 * u1[k] + l22 * u2[k];
                o[k] = w1 * g.tau1[k] + w2 * g.tau2[k];
            }
    }
    halo_exchange(out);
    return out;
}

SymTensorField strain(const VectorField& u) {
    require_halos(u, "strain");
    const SurfaceAtlas& atlas = *u.atlas;
    SymTensorField out = make_mat3(atlas, true);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];
        std::vector<Mat3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                const Vec3 d1 = deriv(f, k, ch.N2(), ch.h1);
                const Vec3 d2 = deriv(f, k, 1, ch.h2);
                const Mat3 grad = g.dual1[k] * d1.transpose() + g.dual2[k] * d2.transpose();
                const Mat3 P = g.projector(k);
                o[k] = 0.5 * (P * (grad + grad.transpose()) * P);
            }
    }
    halo_exchange(out);
    return out;
}

VectorField div_symtensor(const Mat3Field& T) {
    require_halos(T, "div_symtensor");
    const SurfaceAtlas& atlas = *T.atlas;
    VectorField out = make_vector(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Mat3>& f = T.data[c];
        std::vector<Vec3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                const Mat3 d1 = deriv(f, k, ch.N2(), ch.h1);
                const Mat3 d2 = deriv(f, k, 1, ch.h2);
                o[k] = d1.transpose() * g.dual1[k] + d2.transpose() * g.dual2[k];
            }
    }
    halo_exchange(out);
    return out;
}

TangentField bochner_laplacian(const VectorField& u) {
    require_halos(u, "bochner_laplacian");
    const SurfaceAtlas& atlas = *u.atlas;
    TangentField out = make_tangent(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];

        // First level w_a = P d_a u on the widest stencil-fit zone; these are
        // chart-local quantities and must not be halo-exchanged.
        std::vector<Vec3> w1(f.size(), Vec3::Zero()), w2(f.size(), Vec3::Zero());
        for (int i = 2; i < ch.N1() - 2; ++i)
            for (int j = 2; j < ch.N2() - 2; ++j) {
                const int k = ch.idx(i, j);
                const Vec3 d1 = deriv(f, k, ch.N2(), ch.h1);
                const Vec3 d2 = deriv(f, k, 1, ch.h2);
                w1[k] = d1 - g.nu[k] * g.nu[k].dot(d1);
                w2[k] = d2 - g.nu[k] * g.nu[k].dot(d2);
            }

        std::vector<Vec3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                const Vec3 d1w1 = deriv(w1, k, ch.N2(), ch.h1);
                const Vec3 d1w2 = deriv(w2, k, ch.N2(), ch.h1);
                const Vec3 d2w1 = deriv(w1, k, 1, ch.h2);
                const Vec3 d2w2 = deriv(w2, k, 1, ch.h2);
                Vec3 v = g.gi11[k] * d1w1 + g.gi12[k] * (d1w2 + d2w1) + g.gi22[k] * d2w2;
                const double a1 =
                    g.gi11[k] * g.c111[k] + 2.0 * g.gi12[k] * g.c112[k] + g.gi22[k] * g.c122[k];
                const double a2 =
                    g.gi11[k] * g.c211[k] + 2.0 * g.gi12[k] * g.c212[k] + g.gi22[k] * g.c222[k];
                v -= a1 * w1[k] + a2 * w2[k];
                o[k] = v - g.nu[k] * g.nu[k].dot(v);
            }
    }
    halo_exchange(out);
    return out;
}

TangentField curvature_op(const VectorField& u) {
    require_halos(u, "curvature_op");
    const SurfaceAtlas& atlas = *u.atlas;
    TangentField out = make_tangent(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];
        std::vector<Vec3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                const Mat3 W = g.weingarten(k);
                const Vec3 Wu = W * f[k];
                o[k] = g.kappa[k] * Wu - W * Wu;
            }
    }
    halo_exchange(out);
    return out;
}

ScalarField laplace_beltrami(const ScalarField& phi) {
    return surface_divergence(surface_gradient(phi));
}

TangentField stokes_rhs(const VectorField& u, double mu, StokesRoute route) {
    require_halos(u, "stokes_rhs");
    const SurfaceAtlas& atlas = *u.atlas;
    if (route == StokesRoute::div_strain) {
        SymTensorField D = strain(u);
        VectorField divD = div_symtensor(D);
        TangentField out = make_tangent(atlas);
        for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
            const Chart& ch = atlas.charts[c];
            const GeometryCache& g = atlas.geom[c];
            const std::vector<Vec3>& f = divD.data[c];
            std::vector<Vec3>& o = out.data[c];
            for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
                for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                    const int k = ch.idx(i, j);
                    o[k] = 2.0 * mu * (f[k] - g.nu[k] * g.nu[k].dot(f[k]));
                }
        }
        halo_exchange(out);
        return out;
    }
    TangentField lap = bochner_laplacian(u);
    TangentField graddiv = surface_gradient(surface_divergence(u));
    TangentField curv = curvature_op(u);
    TangentField out = make_tangent(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        std::vector<Vec3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                o[k] = mu * (lap.data[c][k] + graddiv.data[c][k] + curv.data[c][k]);
            }
    }
    halo_exchange(out);
    return out;
}

TangentField advection(const VectorField& u) {
    require_halos(u, "advection");
    const SurfaceAtlas& atlas = *u.atlas;
    TangentField out = make_tangent(atlas);
    for (std::size_t c = 0; c < atlas.charts.size(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& g = atlas.geom[c];
        const std::vector<Vec3>& f = u.data[c];
        std::vector<Vec3>& o = out.data[c];
        for (int i = ch.halo; i < ch.halo + ch.n1; ++i)
            for (int j = ch.halo; j < ch.halo + ch.n2; ++j) {
                const int k = ch.idx(i, j);
                // (grad u)^T u = sum_a (tau^a | u) d_a u
                const Vec3 d1 = deriv(f, k, ch.N2(), ch.h1);
                const Vec3 d2 = deriv(f, k, 1, ch.h2);
                const Vec3 v = g.dual1[k].dot(f[k]) * d1 + g.dual2[k].dot(f[k]) * d2;
                o[k] = v - g.nu[k] * g.nu[k].dot(v);
            }
    }
    halo_exchange(out);
    return out;
}

} // namespace surfns
