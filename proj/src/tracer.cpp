#include "surfns/tracer.hpp"

#include <cmath>

#include "surfns/errors.hpp"

namespace surfns {

namespace {

// Cubic Lagrange weights on integer nodes {0,1,2,3} at parameter s in [1,2].
void lagrange4(double s, double w[4]) {
    w[0] = -(s - 1) * (s - 2) * (s - 3) / 6.0;
    w[1] = s * (s - 2) * (s - 3) / 2.0;
    w[2] = -s * (s - 1) * (s - 3) / 2.0;
    w[3] = s * (s - 1) * (s - 2) / 6.0;
}

struct StencilPos {
    int i0, j0;
    double wu[4], wv[4];
};

StencilPos locate(const SurfaceAtlas& atlas, const ChartPoint& p) {
    const Chart& ch = atlas.charts[p.chart];
    double fu = (p.u - ch.u0) / ch.h1;
    double fv = (p.v - ch.v0) / ch.h2;
    // Periodic charts may hand us parameters shifted by a full period.
    if (ch.periodic1) fu = std::fmod(std::fmod(fu - ch.halo, ch.n1) + ch.n1, ch.n1) + ch.halo;
    if (ch.periodic2) fv = std::fmod(std::fmod(fv - ch.halo, ch.n2) + ch.n2, ch.n2) + ch.halo;

    StencilPos sp;
    sp.i0 = static_cast<int>(std::floor(fu)) - 1;
    sp.j0 = static_cast<int>(std::floor(fv)) - 1;
    if (sp.i0 < 0 || sp.j0 < 0 || sp.i0 + 3 >= ch.N1() || sp.j0 + 3 >= ch.N2())
        throw numerical_error("sample: surface point too close to the chart boundary");
    lagrange4(fu - sp.i0, sp.wu);
    lagrange4(fv - sp.j0, sp.wv);
    return sp;
}

template <class T>
T tensor_sample(const std::vector<T>& data, const Chart& ch, const StencilPos& sp, const T& zero) {
    T acc = zero;
    for (int a = 0; a < 4; ++a) {
        T row = zero;
        const int base = ch.idx(sp.i0 + a, sp.j0);
        for (int b = 0; b < 4; ++b) row += sp.wv[b] * data[base + b];
        acc += sp.wu[a] * row;
    }
    return acc;
}

} // namespace

double sample_scalar(const ScalarField& f, const ChartPoint& p) {
    require_halos(f, "sample_scalar");
    const StencilPos sp = locate(*f.atlas, p);
    return tensor_sample(f.data[p.chart], f.atlas->charts[p.chart], sp, 0.0);
}

Vec3 sample_vector(const VectorField& f, const ChartPoint& p) {
    require_halos(f, "sample_vector");
    const SurfaceAtlas& atlas = *f.atlas;
    const StencilPos sp = locate(atlas, p);
    Vec3 v = tensor_sample(f.data[p.chart], atlas.charts[p.chart], sp, Vec3(Vec3::Zero()));
    if (f.tangent) {
        const EmbeddingJet J = atlas.charts[p.chart].embedding->jet(p.u, p.v);
        const Vec3 nu = J.xu.cross(J.xv).normalized();
        v -= nu * nu.dot(v);
    }
    return v;
}

double sample_scalar(const ScalarField& f, const Vec3& x) {
    return sample_scalar(f, closest_point(*f.atlas, x));
}

Vec3 sample_vector(const VectorField& f, const Vec3& x) {
    return sample_vector(f, closest_point(*f.atlas, x));
}

Streamline trace_streamline(const TangentField& u, const Vec3& x0, const TracerConfig& cfg) {
    require_halos(u, "trace_streamline");
    if (cfg.dt <= 0 || cfg.t_end <= 0) throw config_error("trace_streamline: dt, t_end > 0");
    const SurfaceAtlas& atlas = *u.atlas;

    auto project = [&](const Vec3& y) { return position(atlas, closest_point(atlas, y)); };
    auto vel = [&](const Vec3& y) { return sample_vector(u, closest_point(atlas, y)); };

    const int nsteps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    const double dt = cfg.t_end / nsteps;

    Streamline line;
    Vec3 x = project(x0);
    const Vec3 start = x;
    line.times.push_back(0.0);
    line.points.push_back(x);

    for (int s = 1; s <= nsteps; ++s) {
        const Vec3 k1 = vel(x);
        const Vec3 k2 = vel(project(x + 0.5 * dt * k1));
        const Vec3 k3 = vel(project(x + 0.5 * dt * k2));
        const Vec3 k4 = vel(project(x + dt * k3));
        x = project(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        if (s % cfg.sample_every == 0 || s == nsteps) {
            line.times.push_back(s * dt);
            line.points.push_back(x);
        }
    }
    line.closure = (x - start).norm();
    return line;
}

BernoulliReport bernoulli_check(const TangentField& u, const ScalarField& pressure,
                                const std::vector<Vec3>& path) {
    if (path.empty()) throw config_error("bernoulli_check: empty path");
    const SurfaceAtlas& atlas = *u.atlas;
    BernoulliReport rep;
    bool first = true;
    for (const Vec3& x : path) {
        const ChartPoint p = closest_point(atlas, x);
        const Vec3 v = sample_vector(u, p);
        const double e = 0.5 * v.squaredNorm() + sample_scalar(pressure, p);
        if (first) {
            rep.e0 = e;
            first = false;
        }
        rep.max_dev = std::max(rep.max_dev, std::abs(e - rep.e0));
        rep.max_abs_e = std::max(rep.max_abs_e, std::abs(e));
    }
    return rep;
}

} // namespace surfns
