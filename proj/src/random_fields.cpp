#include "surfns/random_fields.hpp"

#include <cmath>
#include <vector>

namespace surfns {

double uniform_pm1(std::mt19937_64& eng) {
    const double u01 = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return 2.0 * u01 - 1.0;
}

namespace {

// One trigonometric mode per wavevector k in {-1,0,1}^3 \ {0}, keeping one
// representative of each +/-k pair.
struct TrigMode {
    Vec3 k;
    double a, b; // coefficients of cos(k.x) and sin(k.x)
};

std::vector<TrigMode> draw_modes(std::mt19937_64& eng) {
    std::vector<TrigMode> modes;
    for (int kx = -1; kx <= 1; ++kx)
        for (int ky = -1; ky <= 1; ++ky)
            for (int kz = -1; kz <= 1; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                if (kx < 0 || (kx == 0 && (ky < 0 || (ky == 0 && kz < 0)))) continue;
                TrigMode m;
                m.k = Vec3(kx, ky, kz);
                m.a = uniform_pm1(eng);
                m.b = uniform_pm1(eng);
                modes.push_back(m);
            }
    return modes;
}

double eval_modes(const std::vector<TrigMode>& modes, const Vec3& x) {
    double s = 0.0;
    for (const TrigMode& m : modes) {
        const double p = m.k.dot(x);
        s += m.a * std::cos(p) + m.b * std::sin(p);
    }
    return s / static_cast<double>(modes.size());
}

} // namespace

ScalarField random_scalar_field(const SurfaceAtlas& atlas, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    const std::vector<TrigMode> modes = draw_modes(eng);
    ScalarField f = make_scalar(atlas);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const GeometryCache& g = atlas.geom[c];
        const Chart& ch = atlas.charts[c];
        for (int k = 0; k < ch.size(); ++k) f.data[c][k] = eval_modes(modes, g.x[k]);
    }
    f.halos_valid = true; // pointwise ambient evaluation is chart-consistent
    return f;
}

TangentField random_tangent_field(const SurfaceAtlas& atlas, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    const std::vector<TrigMode> mx = draw_modes(eng);
    const std::vector<TrigMode> my = draw_modes(eng);
    const std::vector<TrigMode> mz = draw_modes(eng);
    TangentField u = make_tangent(atlas);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const GeometryCache& g = atlas.geom[c];
        const Chart& ch = atlas.charts[c];
        for (int k = 0; k < ch.size(); ++k) {
            const Vec3 x = g.x[k];
            const Vec3 v(eval_modes(mx, x), eval_modes(my, x), eval_modes(mz, x));
            u.data[c][k] = v - g.nu[k] * g.nu[k].dot(v);
        }
    }
    u.halos_valid = true;
    u.tangent = true;
    return u;
}

} // namespace surfns
