// Python bindings. Fields keep their atlas alive through a shared_ptr so the
// raw atlas pointer inside every field stays valid regardless of python
// object lifetimes.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "surfns/atlas.hpp"
#include "surfns/calculus.hpp"
#include "surfns/dynamics.hpp"
#include "surfns/errors.hpp"
#include "surfns/io.hpp"
#include "surfns/killing.hpp"
#include "surfns/random_fields.hpp"
#include "surfns/verify.hpp"

namespace py = pybind11;
using namespace surfns;

namespace {

struct PyAtlas {
    std::shared_ptr<SurfaceAtlas> atlas;
};

struct PyScalar {
    std::shared_ptr<SurfaceAtlas> atlas;
    ScalarField f;
};

struct PyVector {
    std::shared_ptr<SurfaceAtlas> atlas;
    TangentField f;
};

PyAtlas make_atlas(SurfaceAtlas&& a) {
    return {std::make_shared<SurfaceAtlas>(std::move(a))};
}

/// Interior values as (ncharts, n1, n2) float64.
py::array_t<double> scalar_values(const PyScalar& s) {
    const SurfaceAtlas& atlas = *s.atlas;
    const Chart& c0 = atlas.charts[0];
    py::array_t<double> out({atlas.n_charts(), c0.n1, c0.n2});
    auto v = out.mutable_unchecked<3>();
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        for (int i = 0; i < ch.n1; ++i)
            for (int j = 0; j < ch.n2; ++j)
                v(c, i, j) = s.f.data[c][ch.idx(ch.halo + i, ch.halo + j)];
    }
    return out;
}

/// Interior values as (ncharts, n1, n2, 3) float64.
py::array_t<double> vector_values(const PyVector& u) {
    const SurfaceAtlas& atlas = *u.atlas;
    const Chart& c0 = atlas.charts[0];
    py::array_t<double> out({atlas.n_charts(), c0.n1, c0.n2, 3});
    auto v = out.mutable_unchecked<4>();
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        for (int i = 0; i < ch.n1; ++i)
            for (int j = 0; j < ch.n2; ++j) {
                const Vec3& x = u.f.data[c][ch.idx(ch.halo + i, ch.halo + j)];
                for (int k = 0; k < 3; ++k) v(c, i, j, k) = x[k];
            }
    }
    return out;
}

PyScalar scalar_from_values(const PyAtlas& a, py::array_t<double> values) {
    const SurfaceAtlas& atlas = *a.atlas;
    const Chart& c0 = atlas.charts[0];
    auto v = values.unchecked<3>();
    if (v.shape(0) != atlas.n_charts() || v.shape(1) != c0.n1 || v.shape(2) != c0.n2)
        throw config_error("scalar_field: array shape does not match the atlas");
    ScalarField f = make_scalar(atlas);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        for (int i = 0; i < ch.n1; ++i)
            for (int j = 0; j < ch.n2; ++j)
                f.data[c][ch.idx(ch.halo + i, ch.halo + j)] = v(c, i, j);
    }
    f.halos_valid = false;
    halo_exchange(f);
    return {a.atlas, std::move(f)};
}

PyVector vector_from_values(const PyAtlas& a, py::array_t<double> values, bool tangent) {
    const SurfaceAtlas& atlas = *a.atlas;
    const Chart& c0 = atlas.charts[0];
    auto v = values.unchecked<4>();
    if (v.shape(0) != atlas.n_charts() || v.shape(1) != c0.n1 || v.shape(2) != c0.n2 ||
        v.shape(3) != 3)
        throw config_error("vector_field: array shape does not match the atlas");
    VectorField f = make_vector(atlas, tangent);
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        for (int i = 0; i < ch.n1; ++i)
            for (int j = 0; j < ch.n2; ++j)
                f.data[c][ch.idx(ch.halo + i, ch.halo + j)] =
                    Vec3(v(c, i, j, 0), v(c, i, j, 1), v(c, i, j, 2));
    }
    if (tangent) project_tangent(f);
    f.halos_valid = false;
    halo_exchange(f);
    return {a.atlas, std::move(f)};
}

py::array_t<double> atlas_positions(const PyAtlas& a) {
    const SurfaceAtlas& atlas = *a.atlas;
    const Chart& c0 = atlas.charts[0];
    py::array_t<double> out({atlas.n_charts(), c0.n1, c0.n2, 3});
    auto v = out.mutable_unchecked<4>();
    for (int c = 0; c < atlas.n_charts(); ++c) {
        const Chart& ch = atlas.charts[c];
        const GeometryCache& G = atlas.geom[c];
        for (int i = 0; i < ch.n1; ++i)
            for (int j = 0; j < ch.n2; ++j) {
                const Vec3& x = G.x[ch.idx(ch.halo + i, ch.halo + j)];
                for (int k = 0; k < 3; ++k) v(c, i, j, k) = x[k];
            }
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_surfns, m) {
    m.doc() = "Incompressible flow on closed surfaces: sphere, torus, ellipsoid.";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<PyAtlas>(m, "Atlas")
        .def_property_readonly("kind",
                               [](const PyAtlas& a) { return std::string(kind_name(a.atlas->kind)); })
        .def_property_readonly("area", [](const PyAtlas& a) { return a.atlas->area; })
        .def_property_readonly("resolution",
                               [](const PyAtlas& a) { return a.atlas->resolution; })
        .def_property_readonly("n_charts", [](const PyAtlas& a) { return a.atlas->n_charts(); })
        .def_property_readonly("max_spacing",
                               [](const PyAtlas& a) { return a.atlas->max_spacing(); })
        .def("positions", &atlas_positions,
             "Node positions, interior only, shape (ncharts, n1, n2, 3).")
        .def("__repr__", [](const PyAtlas& a) {
            return "<Atlas " + std::string(kind_name(a.atlas->kind)) +
                   " n=" + std::to_string(a.atlas->resolution) + ">";
        });

    py::class_<PyScalar>(m, "ScalarField")
        .def("values", &scalar_values, "Interior values, shape (ncharts, n1, n2).")
        .def("integral", [](const PyScalar& s) { return integrate_scalar(s.f); })
        .def("norm", [](const PyScalar& s) { return norm_l2(s.f); })
        .def("save", [](const PyScalar& s, const std::string& path) { save_field(path, s.f); });

    py::class_<PyVector>(m, "VectorField")
        .def("values", &vector_values, "Interior values, shape (ncharts, n1, n2, 3).")
        .def("norm", [](const PyVector& u) { return norm_l2(u.f); })
        .def("energy", [](const PyVector& u) { return kinetic_energy(u.f); })
        .def("divergence_residual", [](const PyVector& u) { return divergence_residual(u.f); })
        .def("save", [](const PyVector& u, const std::string& path) { save_field(path, u.f); });

    m.def(
        "sphere", [](double radius, int n) { return make_atlas(build_sphere(radius, n)); },
        py::arg("radius") = 1.0, py::arg("n") = 64);
    m.def(
        "torus", [](double R, double r, int n) { return make_atlas(build_torus(R, r, n, n)); },
        py::arg("R") = 2.0, py::arg("r") = 1.0, py::arg("n") = 64);
    m.def(
        "ellipsoid",
        [](double a, double b, double c, int n) { return make_atlas(build_ellipsoid(a, b, c, n)); },
        py::arg("a") = 1.3, py::arg("b") = 1.0, py::arg("c") = 0.7, py::arg("n") = 64);

    m.def("scalar_field", &scalar_from_values, py::arg("atlas"), py::arg("values"),
          "Scalar field from interior values; halos are rebuilt by interpolation.");
    m.def("vector_field", &vector_from_values, py::arg("atlas"), py::arg("values"),
          py::arg("tangent") = true,
          "Vector field from interior values; tangential fields are projected.");

    m.def(
        "rotation",
        [](const PyAtlas& a, std::array<double, 3> axis) {
            VectorField u = rotation_field(*a.atlas, Vec3(axis[0], axis[1], axis[2]));
            project_tangent(u);
            return PyVector{a.atlas, std::move(u)};
        },
        py::arg("atlas"), py::arg("axis") = std::array<double, 3>{0, 0, 1},
        "Tangential projection of the rigid rotation axis x position.");

    m.def(
        "random_scalar",
        [](const PyAtlas& a, std::uint64_t seed) {
            return PyScalar{a.atlas, random_scalar_field(*a.atlas, seed)};
        },
        py::arg("atlas"), py::arg("seed") = 42);

    m.def(
        "random_divfree",
        [](const PyAtlas& a, std::uint64_t seed, double tol) {
            KrylovConfig kc;
            kc.tol = tol;
            return PyVector{a.atlas,
                            helmholtz_project(random_tangent_field(*a.atlas, seed), kc)};
        },
        py::arg("atlas"), py::arg("seed") = 42, py::arg("tol") = 1e-10,
        "Leray projection of a smooth random tangent field.");

    m.def(
        "helmholtz_project",
        [](const PyVector& u, double tol) {
            KrylovConfig kc;
            kc.tol = tol;
            return PyVector{u.atlas, helmholtz_project(u.f, kc)};
        },
        py::arg("u"), py::arg("tol") = 1e-10);

    m.def(
        "gradient",
        [](const PyScalar& s) { return PyVector{s.atlas, surface_gradient(s.f)}; },
        py::arg("f"), "Tangential surface gradient.");
    m.def(
        "divergence",
        [](const PyVector& u) { return PyScalar{u.atlas, surface_divergence(u.f)}; },
        py::arg("u"), "Surface divergence.");
    m.def(
        "laplace_beltrami",
        [](const PyScalar& s) { return PyScalar{s.atlas, laplace_beltrami(s.f)}; },
        py::arg("f"));

    m.def(
        "load_field",
        [](const PyAtlas& a, const std::string& path, bool tangent) {
            return PyVector{a.atlas, load_vector(path, *a.atlas, tangent)};
        },
        py::arg("atlas"), py::arg("path"), py::arg("tangent") = true);
    m.def(
        "load_scalar",
        [](const PyAtlas& a, const std::string& path) {
            return PyScalar{a.atlas, load_scalar(path, *a.atlas)};
        },
        py::arg("atlas"), py::arg("path"));

    m.def(
        "killing",
        [](const PyAtlas& a, int probes, int max_sweeps, double shift, std::uint64_t seed) {
            KillingConfig kc;
            kc.probes = probes;
            kc.max_sweeps = max_sweeps;
            kc.shift = shift;
            kc.seed = seed;
            KillingResult r = killing_fields(*a.atlas, kc);
            py::dict d;
            d["dim"] = r.dim();
            d["quotients"] = r.quotients;
            d["threshold"] = r.threshold;
            d["gap"] = r.gap;
            d["sweeps"] = r.sweeps;
            py::list basis;
            for (TangentField& X : r.basis) basis.append(PyVector{a.atlas, std::move(X)});
            d["basis"] = basis;
            return d;
        },
        py::arg("atlas"), py::arg("probes") = 8, py::arg("max_sweeps") = 40,
        py::arg("shift") = 1.0, py::arg("seed") = 42,
        "Equilibrium fields (strain-free divergence-free): dim, spectrum, basis.");

    m.def(
        "simulate",
        [](const PyVector& u0, double mu, double dt, double t_end, const std::string& scheme,
           int diag_every) {
            SimConfig sc;
            sc.mu = mu;
            sc.dt = dt;
            sc.t_end = t_end;
            sc.scheme = scheme == "imex1" ? Scheme::imex1 : Scheme::imex2;
            sc.diag_every = diag_every;
            SimState s = make_state(u0.f, sc);
            std::vector<double> times, energies, dissipations;
            run(s, sc, [&](const DiagRow& row) {
                times.push_back(row.t);
                energies.push_back(row.energy);
                dissipations.push_back(row.dissipation);
            });
            py::dict d;
            d["t"] = times;
            d["energy"] = energies;
            d["dissipation"] = dissipations;
            d["steps"] = s.step;
            d["velocity"] = PyVector{u0.atlas, std::move(s.u)};
            d["pressure"] = PyScalar{u0.atlas, std::move(s.pressure)};
            return d;
        },
        py::arg("u0"), py::arg("mu") = 1.0, py::arg("dt") = 1e-3, py::arg("t_end") = 1.0,
        py::arg("scheme") = "imex2", py::arg("diag_every") = 1,
        "Integrate the incompressible surface flow from u0.");

    m.def(
        "verify",
        [](const std::string& kind, int n, std::uint64_t seed) {
            SurfaceConfig sc;
            sc.kind = kind;
            sc.n = n;
            VerifyReport rep = run_identity_suite(sc, KrylovConfig{}, seed);
            py::list rows;
            for (const VerifyRow& r : rep.rows) {
                py::dict row;
                row["name"] = r.name;
                row["value"] = r.value;
                row["tol"] = r.tol;
                row["pass"] = r.pass;
                rows.append(row);
            }
            py::dict d;
            d["surface"] = rep.surface;
            d["n"] = rep.n;
            d["all_pass"] = rep.all_pass;
            d["rows"] = rows;
            return d;
        },
        py::arg("kind") = "sphere", py::arg("n") = 32, py::arg("seed") = 42,
        "Run the identity suite; returns per-check residuals and tolerances.");
}
