#include "surfns/fields.hpp"

#include <cmath>
#include <string>

#include "surfns/errors.hpp"

namespace surfns {

namespace {

template <typename T>
std::vector<std::vector<T>> alloc(const SurfaceAtlas& atlas, const T& zero) {
    std::vector<std::vector<T>> d(atlas.n_charts());
    for (int c = 0; c < atlas.n_charts(); ++c)
        d[c].assign(atlas.charts[c].size(), zero);
    return d;
}

/// Periodic wrap of halo rings within one chart.
template <typename T>
void wrap_halos(const Chart& ch, std::vector<T>& d) {
    auto wrap = [](int i, int halo, int n) {
        int k = (i - halo) % n;
        if (k < 0) k += n;
        return k + halo;
    };
    for (int i = 0; i < ch.N1(); ++i)
        for (int j = 0; j < ch.N2(); ++j) {
            if (ch.is_interior(i, j)) continue;
            d[ch.idx(i, j)] = d[ch.idx(wrap(i, ch.halo, ch.n1), wrap(j, ch.halo, ch.n2))];
        }
}

template <typename T>
T gather6x6(const Chart& dch, const std::vector<T>& src, const HaloTarget& t, const T& zero) {
    T acc = zero;
    for (int a = 0; a < 6; ++a) {
        T row = zero;
        const int base = (t.di + a) * dch.N2() + t.dj;
        for (int b = 0; b < 6; ++b) row += t.wv[b] * src[base + b];
        acc += t.wu[a] * row;
    }
    return acc;
}

// Mat3 lacks scalar*Mat3 accumulation in the generic lambda above without
// explicit zero; provide typed helpers instead.
double zero_of(double) { return 0.0; }
Vec3 zero_of(const Vec3&) { return Vec3::Zero(); }
Mat3 zero_of(const Mat3&) { return Mat3::Zero(); }

template <typename T>
void exchange_impl(const SurfaceAtlas& atlas, std::vector<std::vector<T>>& data) {
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        if (ch.periodic1 && ch.periodic2) {
            wrap_halos(ch, data[c]);
            continue;
        }
        const int dc = 1 - c; // two-chart atlases only
        const Chart& dch = atlas.charts[dc];
        const std::vector<T>& src = data[dc];
        for (const HaloTarget& t : atlas.halo_plan[c])
            data[c][t.node] = gather6x6(dch, src, t, zero_of(T{}));
    }
}

} // namespace

ScalarField make_scalar(const SurfaceAtlas& atlas) {
    return {&atlas, alloc(atlas, 0.0), true};
}

VectorField make_vector(const SurfaceAtlas& atlas, bool tangent) {
    return {&atlas, alloc(atlas, Vec3(Vec3::Zero())), true, tangent};
}

TangentField make_tangent(const SurfaceAtlas& atlas) { return make_vector(atlas, true); }

Mat3Field make_mat3(const SurfaceAtlas& atlas, bool tangential) {
    return {&atlas, alloc(atlas, Mat3(Mat3::Zero())), true, tangential};
}

VectorField rotation_field(const SurfaceAtlas& atlas, const Vec3& axis) {
    VectorField u = make_vector(atlas, false);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const GeometryCache& G = atlas.geom[c];
        for (std::size_t k = 0; k < u.data[c].size(); ++k) u.data[c][k] = axis.cross(G.x[k]);
    }
    u.halos_valid = true;
    return u;
}

void halo_exchange(ScalarField& f) {
    exchange_impl(*f.atlas, f.data);
    f.halos_valid = true;
}

void halo_exchange(VectorField& f) {
    const SurfaceAtlas& atlas = *f.atlas;
    exchange_impl(atlas, f.data);
    if (f.tangent && atlas.kind != SurfaceKind::torus) {
        for (int c = 0; c < atlas.n_charts(); ++c) {
            const GeometryCache& G = atlas.geom[c];
            for (const HaloTarget& t : atlas.halo_plan[c]) {
                Vec3& v = f.data[c][t.node];
                v -= G.nu[t.node] * G.nu[t.node].dot(v);
            }
        }
    }
    f.halos_valid = true;
}

void halo_exchange(Mat3Field& f) {
    const SurfaceAtlas& atlas = *f.atlas;
    exchange_impl(atlas, f.data);
    if (f.tangential && atlas.kind != SurfaceKind::torus) {
        for (int c = 0; c < atlas.n_charts(); ++c) {
            const GeometryCache& G = atlas.geom[c];
            for (const HaloTarget& t : atlas.halo_plan[c]) {
                const Mat3 P = G.projector(t.node);
                f.data[c][t.node] = P * f.data[c][t.node] * P;
            }
        }
    }
    f.halos_valid = true;
}

void require_halos(const ScalarField& f, const char* who) {
    if (!f.halos_valid)
        throw numerical_error(std::string(who) + ": stale halos on scalar field");
}
void require_halos(const VectorField& f, const char* who) {
    if (!f.halos_valid)
        throw numerical_error(std::string(who) + ": stale halos on vector field");
}
void require_halos(const Mat3Field& f, const char* who) {
    if (!f.halos_valid)
        throw numerical_error(std::string(who) + ": stale halos on tensor field");
}

namespace {

/// Deterministic compensated quadrature sum over interior nodes.
template <typename F>
double quad_sum(const SurfaceAtlas& atlas, F&& node_value) {
    double total = 0;
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& G = atlas.geom[c];
        double s = 0, comp = 0;
        for (int k = 0; k < ch.size(); ++k) {
            if (!G.interior[k] || G.pou[k] == 0.0) continue;
            const double term = G.pou[k] * G.sqrtg[k] * node_value(c, k);
            const double y = term - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        total += s * ch.h1 * ch.h2;
    }
    return total;
}

} // namespace

double integrate_scalar(const ScalarField& f) {
    return quad_sum(*f.atlas, [&](int c, int k) { return f.data[c][k]; });
}

double inner_l2(const ScalarField& a, const ScalarField& b) {
    return quad_sum(*a.atlas, [&](int c, int k) { return a.data[c][k] * b.data[c][k]; });
}

double inner_l2(const VectorField& a, const VectorField& b) {
    return quad_sum(*a.atlas, [&](int c, int k) { return a.data[c][k].dot(b.data[c][k]); });
}

double inner_l2(const Mat3Field& a, const Mat3Field& b) {
    return quad_sum(*a.atlas,
                    [&](int c, int k) { return a.data[c][k].cwiseProduct(b.data[c][k]).sum(); });
}

double norm_l2(const ScalarField& a) { return std::sqrt(std::max(0.0, inner_l2(a, a))); }
double norm_l2(const VectorField& a) { return std::sqrt(std::max(0.0, inner_l2(a, a))); }
double norm_l2(const Mat3Field& a) { return std::sqrt(std::max(0.0, inner_l2(a, a))); }

void axpy(double alpha, const ScalarField& x, ScalarField& y) {
    for (size_t c = 0; c < y.data.size(); ++c)
        for (size_t k = 0; k < y.data[c].size(); ++k) y.data[c][k] += alpha * x.data[c][k];
    y.halos_valid = y.halos_valid && x.halos_valid;
}

void axpy(double alpha, const VectorField& x, VectorField& y) {
    for (size_t c = 0; c < y.data.size(); ++c)
        for (size_t k = 0; k < y.data[c].size(); ++k) y.data[c][k] += alpha * x.data[c][k];
    y.halos_valid = y.halos_valid && x.halos_valid;
    y.tangent = y.tangent && x.tangent;
}

void scale(ScalarField& f, double alpha) {
    for (auto& chart : f.data)
        for (double& v : chart) v *= alpha;
}

void scale(VectorField& f, double alpha) {
    for (auto& chart : f.data)
        for (Vec3& v : chart) v *= alpha;
}

void remove_mean(ScalarField& f) {
    const double mean = integrate_scalar(f) / f.atlas->area;
    for (auto& chart : f.data)
        for (double& v : chart) v -= mean;
}

void project_tangent(VectorField& u) {
    const SurfaceAtlas& atlas = *u.atlas;
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const GeometryCache& G = atlas.geom[c];
        for (size_t k = 0; k < u.data[c].size(); ++k)
            u.data[c][k] -= G.nu[k] * G.nu[k].dot(u.data[c][k]);
    }
    u.tangent = true;
}

ScalarField pointwise_dot(const VectorField& a, const VectorField& b) {
    ScalarField out = make_scalar(*a.atlas);
    for (size_t c = 0; c < a.data.size(); ++c)
        for (size_t k = 0; k < a.data[c].size(); ++k)
            out.data[c][k] = a.data[c][k].dot(b.data[c][k]);
    out.halos_valid = a.halos_valid && b.halos_valid;
    return out;
}

namespace {

template <typename FieldT, typename F>
double active_max(const FieldT& f, F&& value) {
    const SurfaceAtlas& atlas = *f.atlas;
    double m = 0;
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const GeometryCache& G = atlas.geom[c];
        for (size_t k = 0; k < f.data[c].size(); ++k)
            if (G.active(static_cast<int>(k))) m = std::max(m, value(c, k));
    }
    return m;
}

} // namespace

double max_abs(const ScalarField& f) {
    return active_max(f, [&](int c, size_t k) { return std::abs(f.data[c][k]); });
}

double max_norm(const VectorField& f) {
    return active_max(f, [&](int c, size_t k) { return f.data[c][k].norm(); });
}

double tangency_residual(const VectorField& u) {
    const SurfaceAtlas& atlas = *u.atlas;
    return active_max(u, [&](int c, size_t k) {
        return std::abs(atlas.geom[c].nu[k].dot(u.data[c][k]));
    });
}

bool all_finite(const ScalarField& f) {
    for (const auto& chart : f.data)
        for (double v : chart)
            if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const VectorField& f) {
    for (const auto& chart : f.data)
        for (const Vec3& v : chart)
            if (!v.allFinite()) return false;
    return true;
}

} // namespace surfns
