#include "surfns/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "surfns/errors.hpp"
#include "surfns/log.hpp"

namespace surfns {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kHalo = 4; ///< supports radius-2 stencils applied twice
/// Nodes whose blending weight falls below this are interpolated from the
/// partner chart instead of being solved for; the quadrature never sees a
/// meaningful contribution from them, so unknowns below the floor would be
/// invisible to the weighted inner product and poison CG.
constexpr double kPouFloor = 1e-8;

Mat3 yang_rotation() {
    Mat3 M;
    M << -1, 0, 0, 0, 0, 1, 0, 1, 0; // involution, det = +1
    return M;
}

/// Yin-Yang overlap layout: chart latitude band [pi/4-d_th, 3pi/4+d_th],
/// longitude band +-(3pi/4+d_ph). The partition-of-unity transition spans
/// d_* + win_* (reaching inward), wide enough that the trapezoid sums of the
/// C-infinity-blended integrand converge well beyond fourth order.
struct PouParams {
    double d_th, d_ph, win_th, win_ph;
};

PouParams pou_params(int n) {
    if (n >= 28) return {0.40, 0.55, 0.40, 0.60};
    // Coarse grids: a smaller overhang keeps the halo rings off the poles, and
    // the blending band must still span several spacings for the donor checks.
    return {0.20, 0.25, 0.30, 0.35};
}

double cinf_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    auto sig = [](double t) { return std::exp(-0.5 / (t * t)); };
    const double p = sig(s), q = sig(1.0 - s);
    return p / (p + q);
}

double profile(double t, double lo, double hi, double d0, double win) {
    return cinf_step((t - (lo - d0)) / (d0 + win)) *
           cinf_step(((hi + d0) - t) / (d0 + win));
}

double yy_weight(double th, double ph, const PouParams& p) {
    return profile(th, kPi / 4, 3 * kPi / 4, p.d_th, p.win_th) *
           profile(ph, -3 * kPi / 4, 3 * kPi / 4, p.d_ph, p.win_ph);
}

/// Coordinate transition between the two charts on the unit-sphere preimage:
/// s' = M s, and M is its own inverse, so the same map works both ways.
void partner_angles(double u, double v, double& up, double& vp) {
    const double su = std::sin(u);
    const Vec3 s(su * std::cos(v), su * std::sin(v), std::cos(u));
    const Vec3 sp(-s.x(), s.z(), s.y());
    up = std::acos(std::clamp(sp.z(), -1.0, 1.0));
    vp = std::atan2(sp.y(), sp.x());
}

void fill_geometry_node(const EmbeddingJet& J, GeometryCache& G, int k) {
    G.x[k] = J.x;
    G.tau1[k] = J.xu;
    G.tau2[k] = J.xv;
    const Vec3 n = J.xu.cross(J.xv);
    const double sg = n.norm();
    if (!(sg > 0.0)) throw config_error("degenerate chart metric (sqrt(det g) = 0)");
    G.nu[k] = n / sg;
    G.sqrtg[k] = sg;
    const double g11 = J.xu.dot(J.xu), g12 = J.xu.dot(J.xv), g22 = J.xv.dot(J.xv);
    const double det = g11 * g22 - g12 * g12;
    if (!(det > 0.0)) throw config_error("chart metric not positive definite");
    G.g11[k] = g11;
    G.g12[k] = g12;
    G.g22[k] = g22;
    G.gi11[k] = g22 / det;
    G.gi12[k] = -g12 / det;
    G.gi22[k] = g11 / det;
    G.dual1[k] = G.gi11[k] * J.xu + G.gi12[k] * J.xv;
    G.dual2[k] = G.gi12[k] * J.xu + G.gi22[k] * J.xv;
    const double l11 = J.xuu.dot(G.nu[k]);
    const double l12 = J.xuv.dot(G.nu[k]);
    const double l22 = J.xvv.dot(G.nu[k]);
    G.l11[k] = l11;
    G.l12[k] = l12;
    G.l22[k] = l22;
    G.lm11[k] = G.gi11[k] * l11 + G.gi12[k] * l12;
    G.lm12[k] = G.gi11[k] * l12 + G.gi12[k] * l22;
    G.lm21[k] = G.gi12[k] * l11 + G.gi22[k] * l12;
    G.lm22[k] = G.gi12[k] * l12 + G.gi22[k] * l22;
    G.kappa[k] = G.lm11[k] + G.lm22[k];
    G.gauss[k] = (l11 * l22 - l12 * l12) / det;
    G.c111[k] = J.xuu.dot(G.dual1[k]);
    G.c112[k] = J.xuv.dot(G.dual1[k]);
    G.c122[k] = J.xvv.dot(G.dual1[k]);
    G.c211[k] = J.xuu.dot(G.dual2[k]);
    G.c212[k] = J.xuv.dot(G.dual2[k]);
    G.c222[k] = J.xvv.dot(G.dual2[k]);
}

void resize_geometry(GeometryCache& G, int n) {
    G.x.resize(n);
    G.tau1.resize(n);
    G.tau2.resize(n);
    G.dual1.resize(n);
    G.dual2.resize(n);
    G.nu.resize(n);
    G.g11.resize(n);
    G.g12.resize(n);
    G.g22.resize(n);
    G.gi11.resize(n);
    G.gi12.resize(n);
    G.gi22.resize(n);
    G.sqrtg.resize(n);
    G.l11.resize(n);
    G.l12.resize(n);
    G.l22.resize(n);
    G.lm11.resize(n);
    G.lm12.resize(n);
    G.lm21.resize(n);
    G.lm22.resize(n);
    G.kappa.resize(n);
    G.gauss.resize(n);
    G.c111.resize(n);
    G.c112.resize(n);
    G.c122.resize(n);
    G.c211.resize(n);
    G.c212.resize(n);
    G.c222.resize(n);
    G.pou.assign(n, 0.0);
    G.interior.assign(n, 0);
}

/// Accumulates worst-case residuals of identities that must hold at every
/// node: dual-basis duality, unit normal, Weingarten consistency
/// l_ij = -(tau_i | d_j nu), and (kappa L - L^2) = gauss * P for d = 2.
void accumulate_geometry_residuals(const Chart& ch, const GeometryCache& G,
                                   GeometryResiduals& R) {
    for (int i = 0; i < ch.N1(); ++i) {
        for (int j = 0; j < ch.N2(); ++j) {
            const int k = ch.idx(i, j);
            R.duality = std::max({R.duality,
                                  std::abs(G.dual1[k].dot(G.tau1[k]) - 1.0),
                                  std::abs(G.dual1[k].dot(G.tau2[k])),
                                  std::abs(G.dual2[k].dot(G.tau1[k])),
                                  std::abs(G.dual2[k].dot(G.tau2[k]) - 1.0)});
            R.unit_normal = std::max(R.unit_normal, std::abs(G.nu[k].norm() - 1.0));
            const EmbeddingJet J = ch.embedding->jet(ch.u(i), ch.v(j));
            const Vec3 dn_u = J.xuu.cross(J.xv) + J.xu.cross(J.xuv);
            const Vec3 dn_v = J.xuv.cross(J.xv) + J.xu.cross(J.xvv);
            const double sg = G.sqrtg[k];
            const Vec3 dnu_u = (dn_u - G.nu[k] * G.nu[k].dot(dn_u)) / sg;
            const Vec3 dnu_v = (dn_v - G.nu[k] * G.nu[k].dot(dn_v)) / sg;
            R.weingarten = std::max({R.weingarten,
                                     std::abs(G.l11[k] + G.tau1[k].dot(dnu_u)),
                                     std::abs(G.l12[k] + G.tau1[k].dot(dnu_v)),
                                     std::abs(G.l12[k] + G.tau2[k].dot(dnu_u)),
                                     std::abs(G.l22[k] + G.tau2[k].dot(dnu_v))});
            const Mat3 W = G.weingarten(k);
            const Mat3 res = G.kappa[k] * W - W * W - G.gauss[k] * G.projector(k);
            R.curvature = std::max(R.curvature, res.cwiseAbs().maxCoeff());
        }
    }
}

void validate_geometry(const Chart& ch, const GeometryCache& G) {
    GeometryResiduals R;
    accumulate_geometry_residuals(ch, G, R);
    if (R.duality > 1e-12 || R.unit_normal > 1e-12)
        throw numerical_error("geometry cache failed dual-basis/normal identity");
    if (R.weingarten > 1e-10 || R.curvature > 1e-10)
        throw numerical_error("geometry cache failed curvature identity");
    SURFNS_DEBUG("geometry identities: dual %.2e nu %.2e weingarten %.2e kL-L2 %.2e",
                 R.duality, R.unit_normal, R.weingarten, R.curvature);
}

std::array<double, 6> lagrange6(double t) {
    // Weights for nodes at offsets 0..5, evaluation point t (typically in [2,3]).
    std::array<double, 6> w;
    for (int k = 0; k < 6; ++k) {
        double num = 1.0, den = 1.0;
        for (int m = 0; m < 6; ++m) {
            if (m == k) continue;
            num *= t - m;
            den *= static_cast<double>(k - m);
        }
        w[k] = num / den;
    }
    return w;
}

SurfaceAtlas build_yinyang(SurfaceKind kind, const Mat3& scale, int n) {
    if (n < 16) throw config_error("sphere/ellipsoid atlas requires n >= 16");
    const PouParams p = pou_params(n);
    const double th_lo = kPi / 4 - p.d_th, th_hi = 3 * kPi / 4 + p.d_th;
    const double ph_hi = 3 * kPi / 4 + p.d_ph, ph_lo = -ph_hi;
    const double h1 = (th_hi - th_lo) / (n - 1);
    const int n2 = static_cast<int>(std::llround((ph_hi - ph_lo) / h1)) + 1;
    const double h2 = (ph_hi - ph_lo) / (n2 - 1);
    if (th_lo - kHalo * h1 <= 1e-3 || th_hi + kHalo * h1 >= kPi - 1e-3)
        throw config_error("sphere/ellipsoid atlas: halo rings would cross the poles");

    SurfaceAtlas atlas;
    atlas.kind = kind;
    atlas.resolution = n;
    const Mat3 rots[2] = {Mat3::Identity(), yang_rotation()};
    for (int c = 0; c < 2; ++c) {
        atlas.embeddings.push_back(std::make_unique<SphericalChartEmbedding>(scale * rots[c]));
        Chart ch;
        ch.n1 = n;
        ch.n2 = n2;
        ch.halo = kHalo;
        ch.h1 = h1;
        ch.h2 = h2;
        ch.u0 = th_lo - kHalo * h1;
        ch.v0 = ph_lo - kHalo * h2;
        ch.embedding = atlas.embeddings.back().get();
        atlas.charts.push_back(ch);
    }

    atlas.geom.resize(2);
    atlas.halo_plan.resize(2);
    for (int c = 0; c < 2; ++c) {
        const Chart& ch = atlas.charts[c];
        GeometryCache& G = atlas.geom[c];
        resize_geometry(G, ch.size());
        for (int i = 0; i < ch.N1(); ++i) {
            for (int j = 0; j < ch.N2(); ++j) {
                const int k = ch.idx(i, j);
                fill_geometry_node(ch.embedding->jet(ch.u(i), ch.v(j)), G, k);
                if (ch.is_interior(i, j)) {
                    G.interior[k] = 1;
                    const double w = yy_weight(ch.u(i), ch.v(j), p);
                    if (w > 0.0) {
                        double up, vp;
                        partner_angles(ch.u(i), ch.v(j), up, vp);
                        G.pou[k] = w / (w + yy_weight(up, vp, p));
                    }
                }
            }
        }
        validate_geometry(ch, G);
    }

    // Exchange plan: a node is computed by the chart that carries weight for
    // it and interpolated otherwise. Receptors are the halo rings plus the
    // near-weightless skirt inside the blending window; leaving the skirt as
    // unknowns would make the weighted energy form singular and break the
    // Krylov solvers. Donor stencils must consist of computed nodes only.
    for (int c = 0; c < 2; ++c) {
        const Chart& ch = atlas.charts[c];
        const Chart& dch = atlas.charts[1 - c];
        const GeometryCache& dG = atlas.geom[1 - c];
        for (int i = 0; i < ch.N1(); ++i) {
            for (int j = 0; j < ch.N2(); ++j) {
                if (atlas.geom[c].pou[ch.idx(i, j)] >= kPouFloor) continue;
                double up, vp;
                partner_angles(ch.u(i), ch.v(j), up, vp);
                const double ta = (up - dch.u0) / dch.h1;
                const double tb = (vp - dch.v0) / dch.h2;
                const int di = static_cast<int>(std::floor(ta)) - 2;
                const int dj = static_cast<int>(std::floor(tb)) - 2;
                if (di < dch.halo || di + 5 >= dch.halo + dch.n1 ||
                    dj < dch.halo || dj + 5 >= dch.halo + dch.n2)
                    throw config_error("atlas overlap too small for halo interpolation");
                for (int a = 0; a < 6; ++a)
                    for (int b = 0; b < 6; ++b)
                        if (dG.pou[dch.idx(di + a, dj + b)] < kPouFloor)
                            throw config_error(
                                "atlas blending window too narrow: donor stencil "
                                "touches an interpolated node");
                HaloTarget t;
                t.node = ch.idx(i, j);
                t.di = di;
                t.dj = dj;
                t.wu = lagrange6(ta - di);
                t.wv = lagrange6(tb - dj);
                atlas.halo_plan[c].push_back(t);
            }
        }
    }

    double area = 0;
    for (int c = 0; c < 2; ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& G = atlas.geom[c];
        double s = 0;
        for (int k = 0; k < ch.size(); ++k) s += G.pou[k] * G.sqrtg[k];
        area += s * ch.h1 * ch.h2;
    }
    atlas.area = area;
    SURFNS_INFO("built %s atlas: n=%d charts=2 grid=%dx%d area=%.12g",
                kind == SurfaceKind::sphere ? "sphere" : "ellipsoid", n,
                atlas.charts[0].N1(), atlas.charts[0].N2(), area);
    return atlas;
}

} // namespace

GeometryResiduals geometry_residuals(const SurfaceAtlas& atlas) {
    GeometryResiduals R;
    for (int c = 0; c < atlas.n_charts(); ++c)
        accumulate_geometry_residuals(atlas.charts[c], atlas.geom[c], R);
    return R;
}

double SurfaceAtlas::max_spacing() const {
    double h = 0;
    for (const Chart& ch : charts) h = std::max({h, ch.h1, ch.h2});
    return h;
}

double SurfaceAtlas::min_spacing() const {
    double h = std::numeric_limits<double>::max();
    for (int c = 0; c < n_charts(); ++c) {
        const Chart& ch = charts[c];
        const GeometryCache& G = geom[c];
        for (int k = 0; k < ch.size(); ++k) {
            if (!G.active(k)) continue;
            h = std::min({h, ch.h1 * std::sqrt(G.g11[k]), ch.h2 * std::sqrt(G.g22[k])});
        }
    }
    return h;
}

SurfaceAtlas build_torus(double R, double r, int n_u, int n_v) {
    if (!(R > r && r > 0)) throw config_error("torus requires R > r > 0");
    if (n_u < 16 || n_v < 16 || n_u % 2 || n_v % 2)
        throw config_error("torus grid requires even n_u, n_v >= 16");
    SurfaceAtlas atlas;
    atlas.kind = SurfaceKind::torus;
    atlas.R = R;
    atlas.r = r;
    atlas.resolution = n_u;
    atlas.embeddings.push_back(std::make_unique<TorusEmbedding>(R, r));
    Chart ch;
    ch.n1 = n_u;
    ch.n2 = n_v;
    ch.halo = kHalo;
    ch.periodic1 = ch.periodic2 = true;
    ch.h1 = 2 * kPi / n_u;
    ch.h2 = 2 * kPi / n_v;
    ch.u0 = -kHalo * ch.h1;
    ch.v0 = -kHalo * ch.h2;
    ch.embedding = atlas.embeddings.back().get();
    atlas.charts.push_back(ch);
    atlas.geom.resize(1);
    atlas.halo_plan.resize(1);
    GeometryCache& G = atlas.geom[0];
    resize_geometry(G, ch.size());
    for (int i = 0; i < ch.N1(); ++i) {
        for (int j = 0; j < ch.N2(); ++j) {
            const int k = ch.idx(i, j);
            fill_geometry_node(ch.embedding->jet(ch.u(i), ch.v(j)), G, k);
            if (ch.is_interior(i, j)) {
                G.interior[k] = 1;
                G.pou[k] = 1.0;
            }
        }
    }
    validate_geometry(ch, G);
    double s = 0;
    for (int k = 0; k < ch.size(); ++k) s += G.pou[k] * G.sqrtg[k];
    atlas.area = s * ch.h1 * ch.h2;
    SURFNS_INFO("built torus atlas: R=%g r=%g grid=%dx%d area=%.12g", R, r, n_u, n_v,
                atlas.area);
    return atlas;
}

const char* kind_name(SurfaceKind kind) {
    switch (kind) {
        case SurfaceKind::sphere: return "sphere";
        case SurfaceKind::torus: return "torus";
        case SurfaceKind::ellipsoid: return "ellipsoid";
    }
    return "?";
}

SurfaceAtlas build_sphere(double radius, int n) {
    if (!(radius > 0)) throw config_error("sphere requires radius > 0");
    SurfaceAtlas atlas = build_yinyang(SurfaceKind::sphere, radius * Mat3::Identity(), n);
    atlas.radius = radius;
    return atlas;
}

SurfaceAtlas build_ellipsoid(double a, double b, double c, int n) {
    if (!(a > 0 && b > 0 && c > 0))
        throw config_error("ellipsoid requires positive semi-axes");
    SurfaceAtlas atlas = build_yinyang(SurfaceKind::ellipsoid, Vec3(a, b, c).asDiagonal(), n);
    atlas.a = a;
    atlas.b = b;
    atlas.c = c;
    return atlas;
}

Vec3 position(const SurfaceAtlas& atlas, const ChartPoint& p) {
    return atlas.charts[p.chart].embedding->position(p.u, p.v);
}

ChartPoint partner_point(const SurfaceAtlas& atlas, int chart, double u, double v) {
    if (atlas.n_charts() != 2) throw config_error("partner_point needs a two-chart atlas");
    double up, vp;
    partner_angles(u, v, up, vp);
    return ChartPoint{1 - chart, up, vp};
}

double pou_weight_at(const SurfaceAtlas& atlas, int chart, double u, double v) {
    if (atlas.kind == SurfaceKind::torus) return 1.0;
    const PouParams p = pou_params(atlas.resolution);
    const double w = yy_weight(u, v, p);
    if (w <= 0.0) return 0.0;
    double up, vp;
    partner_angles(u, v, up, vp);
    (void)chart; // both charts share the parameter-space weight profile
    return w / (w + yy_weight(up, vp, p));
}

namespace {

/// Chart choice for a unit-sphere direction: the chart with the larger raw
/// weight wins (same normalisation denominator), ties go to chart 0.
ChartPoint pick_yinyang_chart(const SurfaceAtlas& atlas, const Vec3& s) {
    const PouParams p = pou_params(atlas.resolution);
    const double th0 = std::acos(std::clamp(s.z(), -1.0, 1.0));
    const double ph0 = std::atan2(s.y(), s.x());
    const Vec3 sp(-s.x(), s.z(), s.y());
    const double th1 = std::acos(std::clamp(sp.z(), -1.0, 1.0));
    const double ph1 = std::atan2(sp.y(), sp.x());
    const double w0 = yy_weight(th0, ph0, p);
    const double w1 = yy_weight(th1, ph1, p);
    if (w0 <= 0.0 && w1 <= 0.0)
        throw numerical_error("point not covered by either chart's active region");
    if (w0 >= w1) return {0, th0, ph0};
    return {1, th1, ph1};
}

} // namespace

ChartPoint closest_point(const SurfaceAtlas& atlas, const Vec3& y) {
    switch (atlas.kind) {
        case SurfaceKind::sphere: {
            const double rho = y.norm();
            if (std::abs(rho - atlas.radius) >= atlas.radius / 2)
                throw numerical_error("closest_point: outside sphere projection tube");
            return pick_yinyang_chart(atlas, y / rho);
        }
        case SurfaceKind::torus: {
            const double rho = std::hypot(y.x(), y.y());
            const double du = std::hypot(rho - atlas.R, y.z());
            if (std::abs(du - atlas.r) >= atlas.r / 2)
                throw numerical_error("closest_point: outside torus projection tube");
            double u = std::atan2(y.y(), y.x());
            double v = std::atan2(y.z(), rho - atlas.R);
            if (u < 0) u += 2 * kPi;
            if (v < 0) v += 2 * kPi;
            return {0, u, v};
        }
        case SurfaceKind::ellipsoid:
            break;
    }
    // Damped Newton for the ellipsoid foot point, seeded from the scaled
    // direction; converges to |grad |x-y|^2| <= 1e-12.
    const Vec3 s0 = Vec3(y.x() / atlas.a, y.y() / atlas.b, y.z() / atlas.c).normalized();
    ChartPoint cp = pick_yinyang_chart(atlas, s0);
    const Chart& ch = atlas.charts[cp.chart];
    double u = cp.u, v = cp.v;
    double F = (ch.embedding->position(u, v) - y).squaredNorm();
    bool converged = false;
    for (int it = 0; it < 50 && !converged; ++it) {
        const EmbeddingJet J = ch.embedding->jet(u, v);
        const Vec3 d = J.x - y;
        const double b1 = d.dot(J.xu), b2 = d.dot(J.xv);
        const double g11 = J.xu.squaredNorm(), g12 = J.xu.dot(J.xv), g22 = J.xv.squaredNorm();
        const double det = g11 * g22 - g12 * g12;
        const Vec3 grad = 2.0 * ((g22 * b1 - g12 * b2) * J.xu + (g11 * b2 - g12 * b1) * J.xv) / det;
        if (grad.norm() <= 1e-12) {
            converged = true;
            break;
        }
        double H11 = g11 + d.dot(J.xuu), H12 = g12 + d.dot(J.xuv), H22 = g22 + d.dot(J.xvv);
        double detH = H11 * H22 - H12 * H12;
        double du, dv;
        if (detH > 1e-14) {
            du = -(H22 * b1 - H12 * b2) / detH;
            dv = -(H11 * b2 - H12 * b1) / detH;
        } else { // fall back to a metric gradient step
            du = -(g22 * b1 - g12 * b2) / det;
            dv = -(g11 * b2 - g12 * b1) / det;
        }
        double lam = 1.0;
        for (int h = 0; h < 12; ++h) {
            const double Fn = (ch.embedding->position(u + lam * du, v + lam * dv) - y).squaredNorm();
            if (Fn <= F) {
                u += lam * du;
                v += lam * dv;
                F = Fn;
                break;
            }
            lam *= 0.5;
        }
    }
    if (!converged)
        throw numerical_error("closest_point: Newton did not converge (outside tube?)");
    const Vec3 foot = ch.embedding->position(u, v);
    if ((foot - y).norm() >= std::min({atlas.a, atlas.b, atlas.c}) / 2)
        throw numerical_error("closest_point: outside ellipsoid projection tube");
    // Re-pick the owning chart at the converged foot point.
    const Vec3 sf = (cp.chart == 0) ? Vec3(std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u))
                                    : Vec3(-std::sin(u) * std::cos(v), std::cos(u), std::sin(u) * std::sin(v));
    ChartPoint best = pick_yinyang_chart(atlas, sf);
    if (best.chart == cp.chart) {
        best.u = u;
        best.v = v;
    }
    return best;
}

} // namespace surfns
