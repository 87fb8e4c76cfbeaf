#include "sns/cli/bench.hpp"
#include "sns/cli/config.hpp"
#include "sns/cli/output.hpp"
#include "sns/cli/sweep.hpp"
#include "sns/diagnostics.hpp"
#include "sns/errors.hpp"
#include "sns/generators.hpp"
#include "sns/geometry.hpp"
#include "sns/mesh_io.hpp"
#include "sns/operators.hpp"
#include "sns/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace sns;
using namespace sns::cli;

namespace {

// Usage problems found after CLI11 parsing (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Stopwatch {
public:
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double dt = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return dt;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.precision(std::numeric_limits<double>::max_digits10);
    return out;
}

void prepare_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

// ---------------------------------------------------------------- mesh-gen

struct MeshGenArgs {
    std::string kind;
    double R = 2.0;
    double r = 0.5;
    int n_major = 0;
    int n_minor = 0;
    std::string axis;
    int n = 0;
    double delta = 0.0;
    std::string midpoints;
    int resolution = 64;
    int smoothing = 3;
    double radius = 1.0;
    int subdivisions = 3;
    std::string field;
    std::string output;
};

void add_mesh_gen(CLI::App& app, MeshGenArgs& a)
{
    auto* cmd = app.add_subcommand("mesh-gen", "generate a torus, level-set n-torus or icosphere mesh");
    cmd->add_option("kind", a.kind, "torus | ntorus | sphere")
        ->required()
        ->check(CLI::IsMember({"torus", "ntorus", "sphere"}));
    cmd->add_option("--R", a.R, "major radius");
    cmd->add_option("--r", a.r, "minor radius");
    cmd->add_option("--nmajor", a.n_major, "vertices around the axis (torus)");
    cmd->add_option("--nminor", a.n_minor, "vertices around the tube (torus)");
    cmd->add_option("--axis", a.axis, "tube axis x | y | z (torus default y, ntorus default z)")
        ->check(CLI::IsMember({"x", "y", "z"}));
    cmd->add_option("--n", a.n, "number of tori (ntorus)");
    cmd->add_option("--delta", a.delta, "level-set offset (ntorus)");
    cmd->add_option("--midpoints", a.midpoints, "torus centres \"x y z; x y z\" (ntorus)");
    cmd->add_option("--resolution", a.resolution, "grid cells along the longest side (ntorus)");
    cmd->add_option("--smoothing", a.smoothing, "smoothing passes (ntorus)");
    cmd->add_option("--radius", a.radius, "sphere radius");
    cmd->add_option("--subdivisions", a.subdivisions, "icosphere level");
    cmd->add_option("--field", a.field, "also write an initial field: rot_stream | killing | harmonic_mean")
        ->check(CLI::IsMember({"rot_stream", "killing", "harmonic_mean"}));
    cmd->add_option("-o,--output", a.output, "output directory")->required();
}

Axis parse_axis(const std::string& s, Axis fallback)
{
    if (s.empty()) {
        return fallback;
    }
    return s == "x" ? Axis::X : (s == "y" ? Axis::Y : Axis::Z);
}

MeshSpec mesh_spec_from(const MeshGenArgs& a)
{
    MeshSpec spec;
    spec.major_radius = a.R;
    spec.minor_radius = a.r;
    if (a.kind == "torus") {
        if (a.n_major <= 0 || a.n_minor <= 0) {
            throw UsageError("mesh-gen torus requires --nmajor and --nminor");
        }
        spec.kind = MeshSpec::Kind::Torus;
        spec.n_major = a.n_major;
        spec.n_minor = a.n_minor;
        spec.axis = parse_axis(a.axis, Axis::Y);
    } else if (a.kind == "ntorus") {
        if (a.n <= 0) {
            throw UsageError("mesh-gen ntorus requires --n");
        }
        spec.kind = MeshSpec::Kind::NTorus;
        spec.axis = parse_axis(a.axis, Axis::Z);
        if (a.midpoints.empty()) {
            if (a.n != 1) {
                throw UsageError("mesh-gen ntorus with --n " + std::to_string(a.n) + " requires --midpoints");
            }
            spec.midpoints = {Vec3::Zero()};
        } else {
            try {
                spec.midpoints = parse_points(a.midpoints);
            } catch (const ConfigError& e) {
                throw UsageError(std::string("--midpoints: ") + e.what());
            }
        }
        if (static_cast<int>(spec.midpoints.size()) != a.n) {
            throw UsageError("--midpoints lists " + std::to_string(spec.midpoints.size()) + " points but --n is " +
                             std::to_string(a.n));
        }
        spec.delta = a.delta;
        spec.resolution = a.resolution;
        spec.smoothing = a.smoothing;
    } else {
        spec.kind = MeshSpec::Kind::Sphere;
        spec.radius = a.radius;
        spec.subdivisions = a.subdivisions;
    }
    return spec;
}

int cmd_mesh_gen(const MeshGenArgs& a)
{
    const MeshSpec spec = mesh_spec_from(a);
    Stopwatch clock;
    const SurfaceMesh mesh = build_mesh(spec);
    const double t_mesh = clock.lap();

    const fs::path dir(a.output);
    prepare_dir(dir);
    save_mesh(mesh, dir / "mesh.off");
    RunConfig echo;
    echo.mesh = spec;
    auto m = manifest("mesh-gen", spec, mesh);
    m["config"] = config_json(echo)["mesh"];
    m["outputs"] = {"mesh.off"};
    if (!a.field.empty()) {
        SimConfig sim;
        sim.curvature = curvature_source(spec, true);
        sim.initial_condition = a.field == "rot_stream" ? InitialCondition::RotStream
                                : a.field == "killing"  ? InitialCondition::Killing
                                                        : InitialCondition::HarmonicMean;
        save_field(initial_condition(mesh, sim, assemble_mass(mesh)), (dir / "field.txt").string());
        m["outputs"].push_back("field.txt");
        m["field"] = a.field;
    }
    m["wall_time_s"]["mesh"] = t_mesh;
    m["wall_time_s"]["output"] = clock.lap();
    write_json(dir / "manifest.json", m);
    std::printf("%s: %d vertices, %d faces, chi = %d, genus %d -> %s\n", a.kind.c_str(), mesh.num_vertices(),
                mesh.num_faces(), mesh.euler_characteristic(), mesh.genus(), (dir / "mesh.off").c_str());
    return 0;
}

// --------------------------------------------------------------------- run

struct RunArgs {
    std::string config;
    std::string output;
    bool quiet = false;
};

void add_run(CLI::App& app, RunArgs& a)
{
    auto* cmd = app.add_subcommand("run", "run a simulation from a config file");
    cmd->add_option("config", a.config, "config file")->required();
    cmd->add_option("-o,--output", a.output, "output directory (overrides output.directory)");
    cmd->add_flag("-q,--quiet", a.quiet, "no progress lines");
}

int cmd_run(const RunArgs& a)
{
    RunConfig config = load_config(a.config);
    if (!a.output.empty()) {
        config.output_dir = a.output;
    }
    Stopwatch clock;
    const SurfaceMesh mesh = build_mesh(config.mesh);
    const double t_mesh = clock.lap();

    const fs::path dir = config.output_dir;
    prepare_dir(dir / "snapshots");
    auto csv = open_output(dir / "diagnostics.csv");
    csv << kDiagnosticsHeader << '\n';
    const auto normals = normals_for(mesh, config.sim.curvature);
    const int every = config.sim.output_every;
    int snapshots = 0;
    double t_output = 0.0;

    const RunResult result = run_simulation(
        mesh, config.sim, [&](const SimulationState& s, const VectorField3& v, const DiagnosticsRecord& r) {
            const auto start = std::chrono::steady_clock::now();
            csv << diagnostics_row(r) << '\n';
            if (s.step % every == 0) {
                std::ostringstream name;
                name << "snapshot_" << std::setw(6) << std::setfill('0') << s.step << ".vtk";
                const fs::path path = dir / "snapshots" / name.str();
                write_vtk(path, mesh, v, s.pressure, rot_h(mesh, normals, v));
                (void)check_vtk(path);
                ++snapshots;
                if (!a.quiet) {
                    std::fprintf(stderr, "t = %7.2f  E = %.6e  h1 = %.4f  defects = %s\n", r.t, r.energy, r.h1,
                                 r.defects_analyzed ? std::to_string(r.defects.size()).c_str() : "-");
                }
            }
            t_output += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        });
    csv.close();
    const double t_total = clock.lap();
    save_field(velocity_of(build_operators(mesh, config.sim), result.final_state), (dir / "final_field.txt").string());

    const auto audit = audit_projection(result, config.sim.krylov_tol);
    auto m = manifest("run", config.mesh, mesh);
    m["config"] = config_json(config);
    m["outputs"] = {"diagnostics.csv", "final_field.txt", "snapshots/"};
    m["summary"] = {{"steps", result.steps.size()},
                    {"snapshots", snapshots},
                    {"final_energy", result.records.back().energy},
                    {"initial_consistency", result.initial_consistency},
                    {"projection_never_increases", audit.never_increases},
                    {"projection_within_bound", audit.within_bound},
                    {"projection_worst_bound_ratio", audit.worst_bound_ratio}};
    m["wall_time_s"] = {{"mesh", t_mesh}, {"simulation", t_total - t_output}, {"output", t_output + clock.lap()}};
    write_json(dir / "manifest.json", m);
    if (!audit.never_increases || !audit.within_bound) {
        std::fprintf(stderr, "warning: projection check failed (worst post/bound %.3g)\n", audit.worst_bound_ratio);
    }
    std::printf("%zu steps, final E = %.6e, results in %s\n", result.steps.size(), result.records.back().energy,
                dir.c_str());
    return 0;
}

// ------------------------------------------------------------- alpha-sweep

struct SweepArgs {
    std::string config;
    std::string alphas;
    std::string output;
};

void add_sweep(CLI::App& app, SweepArgs& a)
{
    auto* cmd = app.add_subcommand("alpha-sweep", "penalty convergence study against the largest alpha");
    cmd->add_option("config", a.config, "config file")->required();
    cmd->add_option("--alphas", a.alphas, "comma separated alphas (overrides sweep.alphas)");
    cmd->add_option("-o,--output", a.output, "output directory (overrides output.directory)");
}

int cmd_alpha_sweep(const SweepArgs& a)
{
    RunConfig config = load_config(a.config);
    if (!a.alphas.empty()) {
        config.alphas = parse_numbers(a.alphas);
    }
    if (!a.output.empty()) {
        config.output_dir = a.output;
    }
    validate_alphas(config.alphas);
    const int threads = threads_from_environment();

    Stopwatch clock;
    const SurfaceMesh mesh = build_mesh(config.mesh);
    const double t_mesh = clock.lap();
    const auto points = alpha_sweep(mesh, config.sim, config.alphas, threads, [](const SweepRun& run) {
        std::fprintf(stderr, "alpha = %g done\n", run.alpha);
    });
    const double t_runs = clock.lap();
    const double slope = sweep_slope(points);

    const fs::path dir = config.output_dir;
    prepare_dir(dir);
    auto csv = open_output(dir / "alpha_sweep.csv");
    csv << kSweepHeader << '\n';
    for (const auto& p : points) {
        csv << p.alpha << ',' << p.error << ',' << p.normal_norm_accum << '\n';
    }
    csv.close();
    auto m = manifest("alpha-sweep", config.mesh, mesh);
    m["config"] = config_json(config);
    m["outputs"] = {"alpha_sweep.csv"};
    m["summary"] = {{"loglog_slope", slope}, {"reference_alpha", points.back().alpha}, {"threads", threads}};
    m["wall_time_s"] = {{"mesh", t_mesh}, {"simulation", t_runs}, {"output", clock.lap()}};
    write_json(dir / "manifest.json", m);
    std::printf("log-log slope of the self-error: %.4f\n", slope);
    return 0;
}

// ---------------------------------------------------------- bench-assembly

struct BenchArgs {
    std::vector<int> levels{3, 4, 5};
    int reps = 5;
    std::string output;
};

void add_bench(CLI::App& app, BenchArgs& a)
{
    auto* cmd = app.add_subcommand("bench-assembly", "time rot-rot against grad-div block assembly");
    cmd->add_option("--levels", a.levels, "icosphere subdivision levels (at least three)")->delimiter(',');
    cmd->add_option("--reps", a.reps, "repetitions per timing (at least five)");
    cmd->add_option("-o,--output", a.output, "output directory")->required();
}

int cmd_bench(const BenchArgs& a)
{
    if (a.levels.size() < 3) {
        throw UsageError("bench-assembly needs at least three refinement levels");
    }
    if (a.reps < 5) {
        throw UsageError("bench-assembly needs --reps >= 5");
    }
    const fs::path dir(a.output);
    prepare_dir(dir);
    auto csv = open_output(dir / "bench_assembly.csv");
    csv << kBenchHeader << '\n';
    nlohmann::json meshes = nlohmann::json::array();
    Stopwatch clock;
    for (int level : a.levels) {
        const auto mesh = generate_icosphere(1.0, level);
        const auto row = bench_assembly(mesh, a.reps);
        csv << row.dofs << ',' << row.t_rotrot << ',' << row.t_graddiv << ',' << row.ratio << '\n';
        meshes.push_back({{"subdivisions", level}, {"vertices", mesh.num_vertices()}, {"sha256", mesh_hash(mesh)}});
        std::printf("dofs %8d  rotrot %.4fs  graddiv %.4fs  ratio %.1f\n", row.dofs, row.t_rotrot, row.t_graddiv,
                    row.ratio);
    }
    csv.close();
    const auto audit = term_audit(generate_icosphere(1.0, 0));
    nlohmann::json m{{"command", "bench-assembly"},
                     {"version", kVersion},
                     {"mesh", {{"provenance", {{"kind", "sphere"}, {"radius", 1.0}}}, {"levels", meshes}}},
                     {"config", {{"levels", a.levels}, {"reps", a.reps}}},
                     {"outputs", {"bench_assembly.csv"}},
                     {"summary",
                      {{"terms_rotrot", audit.rotrot.total_terms()},
                       {"terms_graddiv", audit.graddiv.total_terms()},
                       {"quadrature_points_rotrot", audit.rotrot.quadrature_points},
                       {"quadrature_points_graddiv", audit.graddiv.quadrature_points}}},
                     {"wall_time_s", {{"benchmark", clock.lap()}}}};
    write_json(dir / "manifest.json", m);
    std::printf("assembled terms per face: rotrot %d, graddiv %d\n", audit.rotrot.total_terms(),
                audit.graddiv.total_terms());
    return 0;
}

// ----------------------------------------------------------------- defects

struct DefectArgs {
    std::string mesh;
    std::string field;
    std::string csv;
};

void add_defects(CLI::App& app, DefectArgs& a)
{
    auto* cmd = app.add_subcommand("defects", "list the zeros of a tangent field and their indices");
    cmd->add_option("--mesh", a.mesh, "OFF mesh")->required();
    cmd->add_option("--field", a.field, "field file, one \"x y z\" line per vertex")->required();
    cmd->add_option("--csv", a.csv, "also write the table as CSV");
}

int cmd_defects(const DefectArgs& a)
{
    const SurfaceMesh mesh = load_mesh(a.mesh);
    const VectorField3 field = load_field(a.field, mesh.num_vertices());
    const auto report = detect_defects(mesh, vertex_normals(mesh), field);
    std::ostringstream table;
    table.precision(6);
    table << "vertex,x,y,z,index\n";
    for (const auto& d : report.defects) {
        table << d.vertex << ',' << d.position.x() << ',' << d.position.y() << ',' << d.position.z() << ','
              << d.index << '\n';
    }
    std::fputs(table.str().c_str(), stdout);
    std::printf("%zu defects, sum %d\n", report.defects.size(), report.index_sum);
    if (!a.csv.empty()) {
        auto out = open_output(a.csv);
        out << table.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Surface Navier-Stokes solver on triangulated surfaces"};
    app.require_subcommand(1);
    MeshGenArgs mesh_gen;
    RunArgs run;
    SweepArgs sweep;
    BenchArgs bench;
    DefectArgs defects;
    add_mesh_gen(app, mesh_gen);
    add_run(app, run);
    add_sweep(app, sweep);
    add_bench(app, bench);
    add_defects(app, defects);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("mesh-gen")) {
            return cmd_mesh_gen(mesh_gen);
        }
        if (app.got_subcommand("run")) {
            return cmd_run(run);
        }
        if (app.got_subcommand("alpha-sweep")) {
            return cmd_alpha_sweep(sweep);
        }
        if (app.got_subcommand("bench-assembly")) {
            return cmd_bench(bench);
        }
        return cmd_defects(defects);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
