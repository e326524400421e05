#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "surfns/atlas.hpp"
#include "surfns/dynamics.hpp"

namespace surfns {

struct SurfaceConfig {
    std::string kind = "sphere"; ///< sphere | torus | ellipsoid
    int n = 64;                  ///< nodes per chart direction, in [16, 512]
    double radius = 1.0;         ///< sphere
    double R = 2.0, r = 1.0;     ///< torus radii, R > r
    double a = 1.3, b = 1.0, c = 0.7; ///< ellipsoid semi-axes
};

struct PhysicsConfig {
    double mu = 1.0;
    double dt = 1e-3;
    double t_end = 1.0;
    std::string scheme = "imex2"; ///< imex1 | imex2
    double krylov_tol = 1e-10;
    int krylov_maxiter = 5000;
    int krylov_restart = 100;
};

struct ExperimentConfig {
    std::string type = "simulate"; ///< simulate | verify | killing | trace | stability
    /// zero | killing-rotation | perturbed-killing | random-divfree | from-snapshot
    std::string initial = "killing-rotation";
    Vec3 axis = Vec3(0, 0, 1); ///< rotation axis for killing-rotation
    double omega = 1.0;        ///< angular velocity
    double epsilon = 0.01;     ///< perturbation amplitude
    std::uint64_t seed = 42;   ///< drives all randomness
    std::string snapshot;      ///< velocity snapshot for from-snapshot
    Vec3 trace_x0 = Vec3(1, 0, 0);
    double trace_t = 6.283185307179586;
    double trace_dt = 1e-3;
    int probes = 8;     ///< killing-search subspace size
    int sweeps = 40;    ///< killing-search max filter sweeps
    double shift = 1.0; ///< killing-search smoothing shift
    double fit_lo = 1e-6, fit_hi = 1e-2; ///< stability fit window (relative)
};

struct OutputConfig {
    std::string dir = "out";
    int diag_every = 1;
    int snapshot_every = 0; ///< 0 disables field snapshots
    bool vtk = false;
    bool solver_log = false; ///< per-solve rows in solvers.csv
};

struct RunConfig {
    SurfaceConfig surface;
    PhysicsConfig physics;
    ExperimentConfig experiment;
    OutputConfig output;
    int threads = 0; ///< 0 = hardware concurrency
};

/// Parses an INI file (sections [surface], [physics], [experiment], [output];
/// '#' or ';' comments) and applies --set section.key=value overrides on top.
/// Unknown sections or keys are config errors. `path` may be empty to start
/// from defaults.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Canonical INI echo of every key (used for the run manifest).
std::string config_echo(const RunConfig& cfg);

/// Lists every key with its default, one per line (for --help).
std::string config_keys_help();

SurfaceAtlas build_atlas(const SurfaceConfig& cfg);
Scheme parse_scheme(const std::string& name);
KrylovConfig krylov_config(const PhysicsConfig& cfg);
SimConfig sim_config(const RunConfig& cfg);

} // namespace surfns
