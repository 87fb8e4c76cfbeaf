#include "fixtures.hpp"

#include "sns/cli/bench.hpp"
#include "sns/cli/config.hpp"
#include "sns/cli/output.hpp"
#include "sns/cli/sweep.hpp"
#include "sns/errors.hpp"
#include "sns/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

namespace sns::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("sns_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_tool(const std::string& args)
{
    const std::string cmd = std::string(SNS_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliConfig, ParsesAllSections)
{
    const auto c = parse_config(R"(
# comment
[mesh]
type = ntorus
major_radius = 1
minor_radius = 0.5
midpoints = -1.2 0 0; 1.2 0 0
delta = 1
resolution = 40

[simulation]
formulation = unrotated
Re = 20
tau = 0.05
alpha = 100
t_end = 1
krylov_tol = 1e-9
defects_every = 2

[initial]
condition = rot_stream

[output]
directory = out
every = 4

[sweep]
alphas = 32, 64, 128
)",
                                "/base");
    EXPECT_EQ(c.mesh.kind, MeshSpec::Kind::NTorus);
    EXPECT_EQ(c.mesh.midpoints.size(), 2u);
    EXPECT_EQ(c.mesh.midpoints[0], Vec3(-1.2, 0, 0));
    EXPECT_EQ(c.mesh.axis, Axis::Z);
    EXPECT_EQ(c.sim.formulation, Formulation::Problem1);
    EXPECT_EQ(c.sim.Re, 20.0);
    EXPECT_EQ(c.sim.tau, 0.05);
    EXPECT_EQ(c.sim.alpha, 100.0);
    EXPECT_EQ(c.sim.krylov_tol, 1e-9);
    EXPECT_EQ(c.sim.defects_every, 2);
    EXPECT_EQ(c.sim.output_every, 4);
    EXPECT_EQ(c.sim.initial_condition, InitialCondition::RotStream);
    EXPECT_EQ(c.sim.curvature.mode, CurvatureSource::Mode::AnalyticLevelSet);
    EXPECT_EQ(c.output_dir, fs::path("/base/out"));
    EXPECT_EQ(c.alphas, (std::vector<double>{32, 64, 128}));
}

TEST(CliConfig, DefaultsMatchTorusBenchmark)
{
    const auto c = parse_config("[mesh]\ntype = torus\n");
    EXPECT_EQ(c.sim.Re, 10.0);
    EXPECT_EQ(c.sim.tau, 0.1);
    EXPECT_EQ(c.sim.alpha, 3000.0);
    EXPECT_EQ(c.sim.t_end, 60.0);
    EXPECT_EQ(c.sim.formulation, Formulation::Problem2);
    EXPECT_EQ(c.sim.initial_condition, InitialCondition::HarmonicMean);
    EXPECT_EQ(c.sim.output_every, 10);
    EXPECT_EQ(c.sim.curvature.mode, CurvatureSource::Mode::AnalyticTorus);
}

TEST(CliConfig, RejectsBadInput)
{
    EXPECT_THROW((void)parse_config("[mesh]\ncolour = red\n"), ConfigError);
    EXPECT_THROW((void)parse_config("[simulation]\ntau = fast\n"), ConfigError);
    EXPECT_THROW((void)parse_config("[simulation]\ntau = -1\n"), ConfigError);
    EXPECT_THROW((void)parse_config("[simulation]\nformulation = sideways\n"), ConfigError);
    EXPECT_THROW((void)parse_config("[simulation]\ntau = 0.1\ntau = 0.2\n"), ConfigError);
    EXPECT_THROW((void)parse_config("tau = 0.1\n"), ConfigError);
    EXPECT_THROW((void)parse_config("[mesh]\ntype = file\n"), ConfigError);
    EXPECT_THROW((void)parse_config("[mesh]\nmidpoints = 1 2\n"), ConfigError);
    EXPECT_THROW((void)parse_config("[initial]\ncondition = file\n"), ConfigError);
    EXPECT_THROW((void)load_config("/nonexistent/config.ini"), ConfigError);
}

TEST(CliConfig, BuildsMeshes)
{
    MeshSpec torus;
    torus.n_major = 16;
    torus.n_minor = 8;
    EXPECT_EQ(build_mesh(torus).num_vertices(), 128);
    MeshSpec sphere;
    sphere.kind = MeshSpec::Kind::Sphere;
    sphere.subdivisions = 1;
    EXPECT_EQ(build_mesh(sphere).euler_characteristic(), 2);
}

TEST(Vtk, WriteAndCheck)
{
    const testing::TorusFixture fx(16, 8);
    const auto dir = scratch_dir("vtk");
    const auto v = testing::killing_field(fx.mesh);
    const ScalarField p = ScalarField::LinSpaced(fx.mesh.num_vertices(), 0.0, 1.0);
    write_vtk(dir / "a.vtk", fx.mesh, v, p, rot_h(fx.mesh, fx.normals, v));
    const auto s = check_vtk(dir / "a.vtk");
    EXPECT_EQ(s.points, fx.mesh.num_vertices());
    EXPECT_EQ(s.polygons, fx.mesh.num_faces());
    EXPECT_EQ(s.arrays, (std::vector<std::string>{"velocity", "pressure", "vorticity"}));
    const auto text = read_file(dir / "a.vtk");
    EXPECT_NE(text.find("VECTORS velocity double"), std::string::npos);
    EXPECT_NE(text.find("SCALARS pressure double 1"), std::string::npos);
    EXPECT_NE(text.find("SCALARS vorticity double 1"), std::string::npos);
}

TEST(Vtk, CheckCatchesCorruption)
{
    const testing::TorusFixture fx(8, 4);
    const auto dir = scratch_dir("vtk_bad");
    const auto v = testing::killing_field(fx.mesh);
    const ScalarField z = ScalarField::Zero(fx.mesh.num_vertices());
    std::ostringstream good;
    write_vtk(good, fx.mesh, v, z, z);
    auto corrupt = [&](const std::string& from, const std::string& to) {
        std::string text = good.str();
        const auto at = text.find(from);
        EXPECT_NE(at, std::string::npos);
        text.replace(at, from.size(), to);
        std::ofstream(dir / "b.vtk") << text;
        return dir / "b.vtk";
    };
    EXPECT_THROW((void)check_vtk(corrupt("\n3 0 ", "\n3 99999 ")), LoadError);
    EXPECT_THROW((void)check_vtk(corrupt("POINT_DATA 32", "POINT_DATA 31")), LoadError);
    EXPECT_THROW((void)check_vtk(corrupt("POLYGONS 64 256", "POLYGONS 64 255")), LoadError);
    EXPECT_THROW((void)write_vtk(dir / "c.vtk", fx.mesh, VectorField3(3), z, z), ParameterError);
}

TEST(Csv, DiagnosticsRow)
{
    DiagnosticsRecord r;
    r.t = 0.1 * 3;
    r.energy = 0.5;
    r.h1 = 2.0;
    r.normal_norm = 1e-3;
    r.div_norm = 0.25;
    EXPECT_EQ(diagnostics_row(r), "0.3,0.5,2,0.001,0.25,,");
    r.defects_analyzed = true;
    r.defects.resize(2);
    r.index_sum = -2;
    EXPECT_EQ(diagnostics_row(r), "0.3,0.5,2,0.001,0.25,2,-2");
    EXPECT_EQ(std::string(kDiagnosticsHeader), "t,E,h1,normal_norm,div_norm,n_defects,index_sum");
}

TEST(Hash, KnownVectorAndMeshSensitivity)
{
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto a = generate_torus(2.0, 0.5, 16, 8);
    const auto b = generate_torus(2.0, 0.5, 16, 8);
    const auto c = generate_torus(2.0, 0.5, 16, 9);
    EXPECT_EQ(mesh_hash(a), mesh_hash(b));
    EXPECT_NE(mesh_hash(a), mesh_hash(c));
}

TEST(Manifest, RecordsProvenance)
{
    const auto mesh = generate_torus(2.0, 0.5, 16, 8);
    MeshSpec spec;
    const auto m = manifest("run", spec, mesh);
    EXPECT_EQ(m["command"], "run");
    EXPECT_EQ(m["version"], kVersion);
    EXPECT_EQ(m["mesh"]["sha256"], mesh_hash(mesh));
    EXPECT_EQ(m["mesh"]["euler_characteristic"], 0);
    RunConfig rc;
    const auto j = config_json(rc);
    EXPECT_EQ(j["simulation"]["alpha"], 3000.0);
    EXPECT_EQ(j["mesh"]["type"], "torus");
}

TEST(Sweep, AlphaValidation)
{
    EXPECT_THROW(validate_alphas({32, 64}), ConfigError);
    EXPECT_THROW(validate_alphas({32, 64, 64}), ConfigError);
    EXPECT_THROW(validate_alphas({32, 64, -1}), ConfigError);
    EXPECT_NO_THROW(validate_alphas({32, 64, 128}));
}

TEST(Sweep, SlopeOfPowerLaw)
{
    const std::vector<double> x{1, 2, 4, 8, 16};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(3.0 * std::pow(v, -1.5));
    }
    EXPECT_NEAR(loglog_slope(x, y), -1.5, 1e-12);
    EXPECT_THROW((void)loglog_slope({1, 1}, {1, 2}), ParameterError);
}

TEST(Sweep, ErrorsAgainstLargestAlpha)
{
    const testing::TorusFixture fx(8, 4);
    const auto mass = assemble_mass(fx.mesh);
    const auto base = testing::killing_field(fx.mesh);
    // Synthetic runs v_alpha = base + (1/alpha) e over t in {0, 1}.
    VectorField3 e(fx.mesh.num_vertices());
    e.x.setOnes();
    std::vector<SweepRun> runs;
    for (double a : {10.0, 20.0, 40.0}) {
        SweepRun r;
        r.alpha = a;
        r.sample_times = {0.0, 1.0};
        r.samples = {base + (1.0 / a) * e, base + (1.0 / a) * e};
        r.step_times = {0.0, 1.0};
        r.normal_norms = {1.0 / a, 1.0 / a};
        runs.push_back(r);
    }
    const auto points = sweep_errors(runs, mass);
    ASSERT_EQ(points.size(), 3u);
    const double unit = l2_norm(e, mass);
    EXPECT_NEAR(points[0].error, (1.0 / 10 - 1.0 / 40) * unit, 1e-12);
    EXPECT_NEAR(points[1].error, (1.0 / 20 - 1.0 / 40) * unit, 1e-12);
    EXPECT_EQ(points[2].error, 0.0);
    EXPECT_NEAR(points[0].normal_norm_accum, 0.1, 1e-14);
    runs[1].sample_times = {0.0, 2.0};
    EXPECT_THROW((void)sweep_errors(runs, mass), ParameterError);
}

TEST(Sweep, ThreadCountDoesNotChangeResults)
{
    const auto mesh = generate_torus(2.0, 0.5, 16, 8);
    SimConfig c;
    c.curvature.mode = CurvatureSource::Mode::AnalyticTorus;
    c.t_end = 0.4;
    c.output_every = 2;
    const auto one = alpha_sweep(mesh, c, {10, 100, 1000}, 1);
    const auto three = alpha_sweep(mesh, c, {1000, 10, 100}, 3);
    ASSERT_EQ(one.size(), three.size());
    for (std::size_t k = 0; k < one.size(); ++k) {
        EXPECT_EQ(one[k].alpha, three[k].alpha);
        EXPECT_EQ(one[k].error, three[k].error);
        EXPECT_EQ(one[k].normal_norm_accum, three[k].normal_norm_accum);
    }
}

TEST(Bench, MedianAndAudit)
{
    EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
    EXPECT_THROW((void)median({}), ParameterError);
    const auto audit = term_audit(generate_icosphere(1.0, 1));
    EXPECT_LT(audit.graddiv.total_terms(), audit.rotrot.total_terms());
    const auto row = bench_assembly(generate_icosphere(1.0, 2), 5);
    EXPECT_EQ(row.dofs, 3 * 162);
    EXPECT_GT(row.t_rotrot, 0.0);
    EXPECT_GT(row.t_graddiv, 0.0);
}

TEST(Tool, ExitCodes)
{
    const auto dir = scratch_dir("tool");
    const std::string out = (dir / "mesh").string();
    EXPECT_EQ(run_tool(""), 2);
    EXPECT_EQ(run_tool("frobnicate"), 2);
    EXPECT_EQ(run_tool("mesh-gen torus --R 2 --r 0.5 --nmajor 64 -o " + out), 2);
    EXPECT_EQ(run_tool("mesh-gen torus --R 0.4 --r 0.5 --nmajor 8 --nminor 8 -o " + out), 1);
    EXPECT_EQ(run_tool("mesh-gen torus --R 2 --r 0.5 --nmajor 32 --nminor 12 --field killing -o " + out), 0);
    EXPECT_TRUE(fs::exists(dir / "mesh" / "mesh.off"));
    EXPECT_TRUE(fs::exists(dir / "mesh" / "manifest.json"));
    EXPECT_EQ(run_tool("defects --mesh " + out + "/mesh.off --field " + out + "/field.txt"), 0);
    EXPECT_EQ(run_tool("defects --mesh " + out + "/mesh.off --field /nonexistent"), 1);
    EXPECT_EQ(run_tool("bench-assembly --levels 1,2 -o " + (dir / "b").string()), 2);
}

TEST(Tool, RunWritesOutputs)
{
    const auto dir = scratch_dir("run");
    std::ofstream(dir / "c.ini") << "[mesh]\ntype = torus\nn_major = 24\nn_minor = 8\n"
                                    "[simulation]\nt_end = 0.5\n[output]\ndirectory = out\nevery = 5\n";
    ASSERT_EQ(run_tool("run " + (dir / "c.ini").string() + " -q"), 0);
    const auto csv = read_file(dir / "out" / "diagnostics.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, kDiagnosticsHeader);
    int rows = 0;
    for (std::string line; std::getline(lines, line);) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
    }
    EXPECT_EQ(rows, 6);
    EXPECT_TRUE(fs::exists(dir / "out" / "snapshots" / "snapshot_000000.vtk"));
    EXPECT_TRUE(fs::exists(dir / "out" / "snapshots" / "snapshot_000005.vtk"));
    EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
    // Byte-identical on a rerun.
    ASSERT_EQ(run_tool("run " + (dir / "c.ini").string() + " -o " + (dir / "again").string()), 0);
    EXPECT_EQ(read_file(dir / "again" / "diagnostics.csv"), csv);

    std::ofstream(dir / "dup.ini") << "[mesh]\ntype = torus\nn_major = 24\nn_minor = 8\n[sweep]\nalphas = 1, 1, 2\n";
    EXPECT_EQ(run_tool("alpha-sweep " + (dir / "dup.ini").string()), 2);
}

} // namespace
} // namespace sns::cli
