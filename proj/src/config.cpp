#include "surfns/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "surfns/errors.hpp"

namespace surfns {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error(key + ": expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error(key + ": expected an integer, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error(key + ": expected an unsigned integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw config_error(key + ": expected a boolean, got '" + v + "'");
}

Vec3 to_vec3(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    std::string part;
    double comp[3];
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(in, part, ',')) throw config_error(key + ": expected x,y,z, got '" + v + "'");
        comp[i] = to_double(key, trim(part));
    }
    if (std::getline(in, part, ',')) throw config_error(key + ": expected exactly 3 components");
    return Vec3(comp[0], comp[1], comp[2]);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

// One entry per documented key: setter plus default/description for --help.
struct KeySpec {
    Setter set;
    std::string help;
};

const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> table = {
        {"surface.kind",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              if (v != "sphere" && v != "torus" && v != "ellipsoid")
                  throw config_error(k + ": unknown surface kind '" + v + "'");
              c.surface.kind = v;
          },
          "sphere | torus | ellipsoid (default sphere)"}},
        {"surface.n",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.surface.n = to_int(k, v);
          },
          "grid resolution per chart direction, 16..512 (default 64)"}},
        {"surface.radius",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.surface.radius = to_double(k, v);
          },
          "sphere radius (default 1.0)"}},
        {"surface.R",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.surface.R = to_double(k, v);
          },
          "torus major radius (default 2.0)"}},
        {"surface.r",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.surface.r = to_double(k, v);
          },
          "torus minor radius (default 1.0)"}},
        {"surface.a",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.surface.a = to_double(k, v);
          },
          "ellipsoid semi-axis a (default 1.3)"}},
        {"surface.b",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.surface.b = to_double(k, v);
          },
          "ellipsoid semi-axis b (default 1.0)"}},
        {"surface.c",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.surface.c = to_double(k, v);
          },
          "ellipsoid semi-axis c (default 0.7)"}},
        {"physics.mu",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.physics.mu = to_double(k, v);
          },
          "surface shear viscosity, > 0 (default 1.0)"}},
        {"physics.dt",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.physics.dt = to_double(k, v);
          },
          "time step (default 1e-3)"}},
        {"physics.t_end",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.physics.t_end = to_double(k, v);
          },
          "simulation horizon (default 1.0)"}},
        {"physics.scheme",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              if (v != "imex1" && v != "imex2") throw config_error(k + ": scheme must be imex1 or imex2");
              c.physics.scheme = v;
          },
          "imex1 (Euler) | imex2 (CN/AB2) (default imex2)"}},
        {"physics.krylov_tol",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.physics.krylov_tol = to_double(k, v);
          },
          "relative Krylov residual target (default 1e-10)"}},
        {"physics.krylov_maxiter",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.physics.krylov_maxiter = to_int(k, v);
          },
          "Krylov iteration cap (default 5000)"}},
        {"physics.krylov_restart",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.physics.krylov_restart = to_int(k, v);
          },
          "GMRES restart length (default 100)"}},
        {"experiment.type",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              if (v != "simulate" && v != "verify" && v != "killing" && v != "trace" &&
                  v != "stability")
                  throw config_error(k + ": unknown experiment type '" + v + "'");
              c.experiment.type = v;
          },
          "simulate | verify | killing | trace | stability (default simulate)"}},
        {"experiment.initial",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              if (v != "zero" && v != "killing-rotation" && v != "perturbed-killing" &&
                  v != "random-divfree" && v != "from-snapshot")
                  throw config_error(k + ": unknown initial preset '" + v + "'");
              c.experiment.initial = v;
          },
          "zero | killing-rotation | perturbed-killing | random-divfree | from-snapshot"}},
        {"experiment.axis",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.axis = to_vec3(k, v);
          },
          "rotation axis x,y,z (default 0,0,1)"}},
        {"experiment.omega",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.omega = to_double(k, v);
          },
          "rotation rate (default 1.0)"}},
        {"experiment.epsilon",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.epsilon = to_double(k, v);
          },
          "perturbation amplitude (default 0.01)"}},
        {"experiment.seed",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.seed = to_u64(k, v);
          },
          "64-bit seed driving all randomness (default 42)"}},
        {"experiment.snapshot",
         {[](RunConfig& c, const std::string&, const std::string& v) {
              c.experiment.snapshot = v;
          },
          "velocity snapshot path for from-snapshot"}},
        {"experiment.trace_x0",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.trace_x0 = to_vec3(k, v);
          },
          "streamline seed point x,y,z (default 1,0,0)"}},
        {"experiment.trace_t",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.trace_t = to_double(k, v);
          },
          "streamline integration time (default 2*pi)"}},
        {"experiment.trace_dt",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.trace_dt = to_double(k, v);
          },
          "streamline RK4 step (default 1e-3)"}},
        {"experiment.probes",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.probes = to_int(k, v);
          },
          "killing-search subspace size (default 8)"}},
        {"experiment.sweeps",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.sweeps = to_int(k, v);
          },
          "killing-search max sweeps (default 40)"}},
        {"experiment.shift",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.shift = to_double(k, v);
          },
          "killing-search smoothing shift (default 1.0)"}},
        {"experiment.fit_lo",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.fit_lo = to_double(k, v);
          },
          "stability fit window lower bound / |u0| (default 1e-6)"}},
        {"experiment.fit_hi",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.experiment.fit_hi = to_double(k, v);
          },
          "stability fit window upper bound / |u0| (default 1e-2)"}},
        {"output.dir",
         {[](RunConfig& c, const std::string&, const std::string& v) { c.output.dir = v; },
          "output directory (default out)"}},
        {"output.diag_every",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.output.diag_every = to_int(k, v);
          },
          "diagnostics row cadence in steps (default 1)"}},
        {"output.snapshot_every",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.output.snapshot_every = to_int(k, v);
          },
          "field snapshot cadence in steps, 0 = off (default 0)"}},
        {"output.vtk",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.output.vtk = to_bool(k, v);
          },
          "also write point-cloud VTK per snapshot (default false)"}},
        {"output.solver_log",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.output.solver_log = to_bool(k, v);
          },
          "write per-solve iteration rows to solvers.csv (default false)"}},
    };
    return table;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = key_table().find(key);
    if (it == key_table().end()) throw config_error("unknown config key '" + key + "'");
    it->second.set(cfg, key, value);
}

void validate(const RunConfig& cfg) {
    if (cfg.surface.n < 16 || cfg.surface.n > 512)
        throw config_error("surface.n must lie in [16, 512]");
    if (cfg.physics.mu <= 0) throw config_error("physics.mu must be positive");
    if (cfg.physics.dt <= 0) throw config_error("physics.dt must be positive");
    if (cfg.physics.t_end < 0) throw config_error("physics.t_end must be nonnegative");
    if (cfg.physics.krylov_tol <= 0 || cfg.physics.krylov_maxiter < 1 ||
        cfg.physics.krylov_restart < 2)
        throw config_error("invalid Krylov settings");
    if (cfg.experiment.initial == "from-snapshot" && cfg.experiment.snapshot.empty())
        throw config_error("experiment.snapshot required for from-snapshot initial data");
    if (cfg.experiment.axis.norm() == 0) throw config_error("experiment.axis must be nonzero");
    if (cfg.experiment.probes < 2 || cfg.experiment.sweeps < 1 || cfg.experiment.shift <= 0)
        throw config_error("invalid killing-search settings");
    if (cfg.output.diag_every < 1 || cfg.output.snapshot_every < 0)
        throw config_error("invalid output cadence");
}

} // namespace

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto cut = line.find_first_of("#;");
            if (cut != std::string::npos) line.erase(cut);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw config_error(path + ":" + std::to_string(lineno) + ": malformed section");
                section = trim(line.substr(1, line.size() - 2));
                if (section != "surface" && section != "physics" && section != "experiment" &&
                    section != "output")
                    throw config_error(path + ":" + std::to_string(lineno) +
                                       ": unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
            if (section.empty())
                throw config_error(path + ":" + std::to_string(lineno) + ": key outside a section");
            apply_key(cfg, section + "." + trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw config_error("--set expects section.key=value, got '" + ov + "'");
        apply_key(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    validate(cfg);
    return cfg;
}

std::string config_echo(const RunConfig& cfg) {
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "[surface]\n";
    out << "kind = " << cfg.surface.kind << "\n";
    out << "n = " << cfg.surface.n << "\n";
    out << "radius = " << num(cfg.surface.radius) << "\n";
    out << "R = " << num(cfg.surface.R) << "\n";
    out << "r = " << num(cfg.surface.r) << "\n";
    out << "a = " << num(cfg.surface.a) << "\n";
    out << "b = " << num(cfg.surface.b) << "\n";
    out << "c = " << num(cfg.surface.c) << "\n";
    out << "[physics]\n";
    out << "mu = " << num(cfg.physics.mu) << "\n";
    out << "dt = " << num(cfg.physics.dt) << "\n";
    out << "t_end = " << num(cfg.physics.t_end) << "\n";
    out << "scheme = " << cfg.physics.scheme << "\n";
    out << "krylov_tol = " << num(cfg.physics.krylov_tol) << "\n";
    out << "krylov_maxiter = " << cfg.physics.krylov_maxiter << "\n";
    out << "krylov_restart = " << cfg.physics.krylov_restart << "\n";
    out << "[experiment]\n";
    out << "type = " << cfg.experiment.type << "\n";
    out << "initial = " << cfg.experiment.initial << "\n";
    out << "axis = " << num(cfg.experiment.axis.x()) << "," << num(cfg.experiment.axis.y()) << ","
        << num(cfg.experiment.axis.z()) << "\n";
    out << "omega = " << num(cfg.experiment.omega) << "\n";
    out << "epsilon = " << num(cfg.experiment.epsilon) << "\n";
    out << "seed = " << cfg.experiment.seed << "\n";
    out << "snapshot = " << cfg.experiment.snapshot << "\n";
    out << "trace_x0 = " << num(cfg.experiment.trace_x0.x()) << ","
        << num(cfg.experiment.trace_x0.y()) << "," << num(cfg.experiment.trace_x0.z()) << "\n";
    out << "trace_t = " << num(cfg.experiment.trace_t) << "\n";
    out << "trace_dt = " << num(cfg.experiment.trace_dt) << "\n";
    out << "probes = " << cfg.experiment.probes << "\n";
    out << "sweeps = " << cfg.experiment.sweeps << "\n";
    out << "shift = " << num(cfg.experiment.shift) << "\n";
    out << "fit_lo = " << num(cfg.experiment.fit_lo) << "\n";
    out << "fit_hi = " << num(cfg.experiment.fit_hi) << "\n";
    out << "[output]\n";
    out << "dir = " << cfg.output.dir << "\n";
    out << "diag_every = " << cfg.output.diag_every << "\n";
    out << "snapshot_every = " << cfg.output.snapshot_every << "\n";
    out << "vtk = " << (cfg.output.vtk ? "true" : "false") << "\n";
    out << "solver_log = " << (cfg.output.solver_log ? "true" : "false") << "\n";
    return out.str();
}

std::string config_keys_help() {
    std::ostringstream out;
    for (const auto& [key, spec] : key_table()) out << "  " << key << "\n      " << spec.help << "\n";
    return out.str();
}

SurfaceAtlas build_atlas(const SurfaceConfig& cfg) {
    if (cfg.kind == "sphere") return build_sphere(cfg.radius, cfg.n);
    if (cfg.kind == "torus") return build_torus(cfg.R, cfg.r, cfg.n, cfg.n);
    if (cfg.kind == "ellipsoid") return build_ellipsoid(cfg.a, cfg.b, cfg.c, cfg.n);
    throw config_error("unknown surface kind '" + cfg.kind + "'");
}

Scheme parse_scheme(const std::string& name) {
    if (name == "imex1") return Scheme::imex1;
    if (name == "imex2") return Scheme::imex2;
    throw config_error("unknown scheme '" + name + "'");
}

KrylovConfig krylov_config(const PhysicsConfig& cfg) {
    KrylovConfig k;
    k.tol = cfg.krylov_tol;
    k.max_iter = cfg.krylov_maxiter;
    k.restart = cfg.krylov_restart;
    return k;
}

SimConfig sim_config(const RunConfig& cfg) {
    SimConfig s;
    s.mu = cfg.physics.mu;
    s.dt = cfg.physics.dt;
    s.t_end = cfg.physics.t_end;
    s.scheme = parse_scheme(cfg.physics.scheme);
    s.krylov = krylov_config(cfg.physics);
    s.diag_every = cfg.output.diag_every;
    return s;
}

} // namespace surfns
