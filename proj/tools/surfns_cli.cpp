// Command-line driver: verify / simulate / killing / stability / trace.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 identity-check failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "surfns/config.hpp"
#include "surfns/errors.hpp"
#include "surfns/io.hpp"
#include "surfns/killing.hpp"
#include "surfns/log.hpp"
#include "surfns/random_fields.hpp"
#include "surfns/tracer.hpp"
#include "surfns/verify.hpp"

namespace fs = std::filesystem;
using namespace surfns;

namespace {

std::string outpath(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output.dir) / name).string();
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// manifest.json: resolved config echo, artifact content hashes, toolchain.
/// Two runs are reproducible iff their manifests agree line for line.
void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& artifacts) {
    nlohmann::json j;
    j["command"] = command;
    j["snapshot_format"] = "SURFNS1";
    j["config"] = config_echo(cfg);
    j["versions"]["compiler"] = __VERSION__;
    j["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                             std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION);
    j["versions"]["cxx"] = static_cast<long>(__cplusplus);
    auto files = nlohmann::json::object();
    for (const std::string& name : artifacts)
        files[name] = hash_hex(fnv1a_file(outpath(cfg, name)));
    j["outputs"] = files;
    std::ofstream out(outpath(cfg, "manifest.json"));
    out << j.dump(2) << "\n";
}

/// Routes per-solve stats into solvers.csv while alive.
struct SolverLogGuard {
    std::optional<CsvWriter> csv;
    explicit SolverLogGuard(const RunConfig& cfg) {
        if (!cfg.output.solver_log) return;
        csv.emplace(outpath(cfg, "solvers.csv"), "kind,iterations,residual,method");
        set_solver_log([this](const char* kind, const SolveStats& st) {
            csv->raw(std::string(kind) + "," + std::to_string(st.iterations) + "," +
                     num(st.residual) + "," + st.method);
        });
    }
    ~SolverLogGuard() { set_solver_log(nullptr); }
};

TangentField initial_velocity(const RunConfig& cfg, const SurfaceAtlas& atlas) {
    const ExperimentConfig& ex = cfg.experiment;
    const KrylovConfig kc = krylov_config(cfg.physics);
    if (ex.initial == "zero") return make_tangent(atlas);
    if (ex.initial == "killing-rotation") {
        if (ex.axis.norm() == 0.0) throw config_error("experiment.axis must be nonzero");
        VectorField u = rotation_field(atlas, ex.omega * ex.axis.normalized());
        project_tangent(u);
        return u;
    }
    if (ex.initial == "perturbed-killing") {
        if (ex.axis.norm() == 0.0) throw config_error("experiment.axis must be nonzero");
        VectorField base = rotation_field(atlas, ex.omega * ex.axis.normalized());
        project_tangent(base);
        TangentField u = helmholtz_project(base, kc);
        TangentField w = helmholtz_project(random_tangent_field(atlas, ex.seed), kc);
        scale(w, ex.epsilon * norm_l2(u) / norm_l2(w));
        axpy(1.0, w, u);
        return u;
    }
    if (ex.initial == "random-divfree") {
        TangentField u = helmholtz_project(random_tangent_field(atlas, ex.seed), kc);
        scale(u, ex.omega / norm_l2(u));
        return u;
    }
    if (ex.initial == "from-snapshot") {
        if (ex.snapshot.empty())
            throw config_error("experiment.snapshot is required for initial = from-snapshot");
        return load_vector(ex.snapshot, atlas, /*tangent=*/true);
    }
    throw config_error("unknown experiment.initial '" + ex.initial + "'");
}

int cmd_verify(const RunConfig& cfg) {
    const KrylovConfig kc = krylov_config(cfg.physics);
    VerifyReport coarse = run_identity_suite(cfg.surface, kc, cfg.experiment.seed);
    SurfaceConfig fine_surf = cfg.surface;
    fine_surf.n = cfg.surface.n * 3 / 2;
    VerifyReport fine = run_identity_suite(fine_surf, kc, cfg.experiment.seed);
    const std::vector<double> orders = observed_orders(coarse, fine);

    std::printf("%-46s %13s %13s %-5s %s\n", "check", "residual", "tolerance", "ok", "order");
    bool all = true;
    {
        CsvWriter csv(outpath(cfg, "verify_report.csv"),
                      "name,value,tol,pass,value_fine,tol_fine,pass_fine,order");
        for (std::size_t i = 0; i < coarse.rows.size(); ++i) {
            const VerifyRow& r = coarse.rows[i];
            const VerifyRow& rf = fine.rows[i];
            all = all && r.pass && rf.pass;
            char order_col[16] = "-";
            if (r.convergent) std::snprintf(order_col, sizeof order_col, "%.2f", orders[i]);
            std::printf("%-46s %13.4e %13.4e %-5s %s\n", r.name.c_str(), r.value, r.tol,
                        r.pass && rf.pass ? "ok" : "FAIL", order_col);
            csv.raw(r.name + "," + num(r.value) + "," + num(r.tol) + "," +
                    (r.pass ? "1" : "0") + "," + num(rf.value) + "," + num(rf.tol) + "," +
                    (rf.pass ? "1" : "0") + "," + (r.convergent ? num(orders[i]) : "nan"));
        }
    }
    std::printf("verify[%s n=%d,%d]: %s (%zu checks)\n", coarse.surface.c_str(), coarse.n,
                fine.n, all ? "PASS" : "FAIL", coarse.rows.size());
    write_manifest(cfg, "verify", {"verify_report.csv"});
    return all ? 0 : 4;
}

int cmd_simulate(const RunConfig& cfg) {
    SurfaceAtlas atlas = build_atlas(cfg.surface);
    SimConfig sim = sim_config(cfg);
    SimState s = make_state(initial_velocity(cfg, atlas), sim);
    const double e0 = kinetic_energy(s.u);

    std::vector<std::string> artifacts{"diagnostics.csv", "velocity_final.snap",
                                       "pressure_final.snap"};
    {
        CsvWriter diag(outpath(cfg, "diagnostics.csv"),
                       "step,t,energy,dissipation,div_residual,dt");
        run(s, sim, [&](const DiagRow& row) {
            diag.row({static_cast<double>(row.step), row.t, row.energy, row.dissipation,
                      row.div_residual, row.dt});
            if (cfg.output.snapshot_every > 0 && row.step > 0 &&
                row.step % cfg.output.snapshot_every == 0) {
                char name[48];
                std::snprintf(name, sizeof name, "velocity_%07d.snap", row.step);
                save_field(outpath(cfg, name), s.u);
                artifacts.push_back(name);
            }
        });
    }
    save_field(outpath(cfg, "velocity_final.snap"), s.u);
    save_field(outpath(cfg, "pressure_final.snap"), s.pressure);
    if (cfg.output.vtk) {
        save_vtk(outpath(cfg, "fields.vtk"), atlas, &s.u, &s.pressure);
        artifacts.push_back("fields.vtk");
    }
    const double eT = kinetic_energy(s.u);
    std::printf("simulate[%s n=%d]: %d steps to t=%.6g, energy %.12g -> %.12g, max|div u| %.3e\n",
                cfg.surface.kind.c_str(), cfg.surface.n, s.step, s.t, e0, eT,
                divergence_residual(s.u));
    write_manifest(cfg, "simulate", artifacts);
    return 0;
}

KillingConfig killing_config(const RunConfig& cfg) {
    KillingConfig kc;
    kc.probes = cfg.experiment.probes;
    kc.max_sweeps = cfg.experiment.sweeps;
    kc.shift = cfg.experiment.shift;
    kc.seed = cfg.experiment.seed;
    kc.krylov = krylov_config(cfg.physics);
    return kc;
}

int cmd_killing(const RunConfig& cfg) {
    SurfaceAtlas atlas = build_atlas(cfg.surface);
    KillingResult res = killing_fields(atlas, killing_config(cfg));

    std::printf("killing[%s n=%d]: dim E = %d (gap %.3e, threshold %.3e, %d sweeps)\n",
                cfg.surface.kind.c_str(), cfg.surface.n, res.dim(), res.gap, res.threshold,
                res.sweeps);
    std::vector<std::string> artifacts{"killing_report.csv"};
    {
        CsvWriter csv(outpath(cfg, "killing_report.csv"), "index,strain_quotient,accepted");
        for (std::size_t i = 0; i < res.quotients.size(); ++i) {
            const bool ok = i < res.basis.size();
            std::printf("  probe %zu: strain quotient %.6e %s\n", i, res.quotients[i],
                        ok ? "(killing)" : "");
            csv.row({static_cast<double>(i), res.quotients[i], ok ? 1.0 : 0.0});
        }
    }
    for (int i = 0; i < res.dim(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "killing_%d.snap", i + 1);
        save_field(outpath(cfg, name), res.basis[i]);
        artifacts.push_back(name);
    }
    write_manifest(cfg, "killing", artifacts);
    return 0;
}

int cmd_stability(const RunConfig& cfg) {
    SurfaceAtlas atlas = build_atlas(cfg.surface);
    KillingResult kr = killing_fields(atlas, killing_config(cfg));
    if (kr.dim() == 0)
        throw numerical_error("stability: surface has no equilibrium fields to perturb");
    std::printf("stability[%s n=%d]: dim E = %d\n", cfg.surface.kind.c_str(), cfg.surface.n,
                kr.dim());

    StabilityConfig sc;
    sc.eps = cfg.experiment.epsilon;
    sc.mu = cfg.physics.mu;
    sc.dt = cfg.physics.dt;
    sc.t_end = cfg.physics.t_end;
    sc.scheme = parse_scheme(cfg.physics.scheme);
    sc.seed = cfg.experiment.seed;
    sc.krylov = krylov_config(cfg.physics);
    sc.diag_every = cfg.output.diag_every;
    sc.fit_lo = cfg.experiment.fit_lo;
    sc.fit_hi = cfg.experiment.fit_hi;

    StabilityResult st;
    {
        CsvWriter diag(outpath(cfg, "diagnostics.csv"),
                       "step,t,energy,dissipation,div_residual,dist_to_E,dt");
        st = stability_experiment(kr.basis, sc, [&](const DiagRow& row) {
            diag.row({static_cast<double>(row.step), row.t, row.energy, row.dissipation,
                      row.div_residual, row.dist_to_E, row.dt});
        });
    }
    {
        CsvWriter csv(outpath(cfg, "stability_report.csv"), "key,value");
        csv.raw("decay_rate," + num(st.rate));
        csv.raw("intercept_log10," + num(st.intercept));
        csv.raw("r_squared," + num(st.r2));
        csv.raw("decades," + num(st.decades));
        csv.raw("terminal_ratio," + num(st.terminal_ratio));
        csv.raw("u0_norm," + num(st.u0_norm));
        for (std::size_t i = 0; i < st.terminal_coeffs.size(); ++i)
            csv.raw("terminal_coeff_" + std::to_string(i + 1) + "," +
                    num(st.terminal_coeffs[i]));
    }
    std::printf("  decay rate %.4f (r^2 %.6f over %.2f decades), terminal dist/|u0| %.3e\n",
                st.rate, st.r2, st.decades, st.terminal_ratio);
    for (std::size_t i = 0; i < st.terminal_coeffs.size(); ++i)
        std::printf("  terminal <u(T), X_%zu> = %.9e\n", i + 1, st.terminal_coeffs[i]);
    write_manifest(cfg, "stability", {"diagnostics.csv", "stability_report.csv"});
    return 0;
}

int cmd_trace(const RunConfig& cfg) {
    SurfaceAtlas atlas = build_atlas(cfg.surface);
    const KrylovConfig kc = krylov_config(cfg.physics);
    TangentField u = initial_velocity(cfg, atlas);
    ScalarField pressure = recover_pressure(u, cfg.physics.mu, kc);

    TracerConfig tc;
    tc.dt = cfg.experiment.trace_dt;
    tc.t_end = cfg.experiment.trace_t;
    tc.sample_every = cfg.output.diag_every;
    const Vec3 x0 = position(atlas, closest_point(atlas, cfg.experiment.trace_x0));
    Streamline line = trace_streamline(u, x0, tc);
    BernoulliReport br = bernoulli_check(u, pressure, line.points);
    {
        CsvWriter csv(outpath(cfg, "trace.csv"), "t,x,y,z,speed,pressure,bernoulli");
        for (std::size_t i = 0; i < line.points.size(); ++i) {
            const Vec3& x = line.points[i];
            const Vec3 uv = sample_vector(u, x);
            const double pv = sample_scalar(pressure, x);
            csv.row({line.times[i], x.x(), x.y(), x.z(), uv.norm(), pv,
                     0.5 * uv.squaredNorm() + pv});
        }
    }
    const double scale_e = std::max(br.max_abs_e, 1e-300);
    std::printf("trace[%s n=%d]: %zu samples, orbit closure %.3e, bernoulli dev %.3e "
                "(relative %.3e)\n",
                cfg.surface.kind.c_str(), cfg.surface.n, line.points.size(), line.closure,
                br.max_dev, br.max_dev / scale_e);
    write_manifest(cfg, "trace", {"trace.csv"});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"incompressible flow on closed surfaces (sphere, torus, ellipsoid)"};
    app.require_subcommand(1);
    app.footer("Config keys (INI sections, overridable via --set):\n" + config_keys_help());

    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    int threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "INI configuration file");
        sub->add_option("--set", overrides, "Override a key: section.key=value")
            ->type_name("KEY=VAL");
        sub->add_option("--output", output_dir, "Output directory (overrides output.dir)");
        sub->add_option("--threads", threads, "Linear-algebra thread count (0 = default)");
        return sub;
    };
    CLI::App* c_verify = add_common(app.add_subcommand(
        "verify", "Check geometry, operator, and conservation identities"));
    CLI::App* c_simulate =
        add_common(app.add_subcommand("simulate", "Integrate the surface flow"));
    CLI::App* c_killing =
        add_common(app.add_subcommand("killing", "Compute the equilibrium (Killing) fields"));
    CLI::App* c_stability = add_common(app.add_subcommand(
        "stability", "Perturb an equilibrium and measure the decay back"));
    CLI::App* c_trace = add_common(
        app.add_subcommand("trace", "Integrate a streamline and check the Bernoulli function"));

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path, overrides);
        if (!output_dir.empty()) cfg.output.dir = output_dir;
        if (threads > 0) cfg.threads = threads;
        if (cfg.threads > 0) Eigen::setNbThreads(cfg.threads);
        fs::create_directories(cfg.output.dir);
        SolverLogGuard log_guard(cfg);

        if (c_verify->parsed()) {
            cfg.experiment.type = "verify";
            return cmd_verify(cfg);
        }
        if (c_simulate->parsed()) {
            cfg.experiment.type = "simulate";
            return cmd_simulate(cfg);
        }
        if (c_killing->parsed()) {
            cfg.experiment.type = "killing";
            return cmd_killing(cfg);
        }
        if (c_stability->parsed()) {
            cfg.experiment.type = "stability";
            return cmd_stability(cfg);
        }
        if (c_trace->parsed()) {
            cfg.experiment.type = "trace";
            return cmd_trace(cfg);
        }
        SURFNS_ERROR("no subcommand dispatched");
        return 1;
    } catch (const config_error& e) {
        SURFNS_ERROR("config error: %s", e.what());
        return 2;
    } catch (const numerical_error& e) {
        SURFNS_ERROR("numerical failure: %s", e.what());
        return 3;
    } catch (const std::exception& e) {
        SURFNS_ERROR("unexpected error: %s", e.what());
        return 1;
    }
}
