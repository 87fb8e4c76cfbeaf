#include "sns/cli/output.hpp"

#include "sns/errors.hpp"
#include "sns/mesh_io.hpp"

#include <openssl/evp.h>

#include <cmath>

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sns::cli {

namespace {

std::string axis_name(Axis a)
{
    return a == Axis::X ? "x" : (a == Axis::Y ? "y" : "z");
}

void expect_token(std::istream& in, const std::string& want, const std::filesystem::path& path)
{
    std::string got;
    if (!(in >> got) || got != want) {
        throw LoadError(path.string() + ": expected '" + want + "', found '" + got + "'");
    }
}

int read_count(std::istream& in, const std::string& what, const std::filesystem::path& path)
{
    long n = -1;
    if (!(in >> n) || n < 0 || n > std::numeric_limits<int>::max()) {
        throw LoadError(path.string() + ": bad " + what + " count");
    }
    return static_cast<int>(n);
}

void read_values(std::istream& in, long count, const std::string& what, const std::filesystem::path& path)
{
    for (long k = 0; k < count; ++k) {
        double x = 0.0;
        if (!(in >> x) || !std::isfinite(x)) {
            throw LoadError(path.string() + ": bad value " + std::to_string(k) + " in " + what);
        }
    }
}

} // namespace

void write_vtk(std::ostream& out, const SurfaceMesh& mesh, const VectorField3& velocity, const ScalarField& pressure,
               const ScalarField& vorticity)
{
    const int nv = mesh.num_vertices();
    if (velocity.size() != nv || pressure.size() != nv || vorticity.size() != nv) {
        throw ParameterError("write_vtk: field sizes do not match the mesh");
    }
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "# vtk DataFile Version 3.0\nsurface navier-stokes snapshot\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& p : mesh.vertices()) {
        out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    out << "POLYGONS " << mesh.num_faces() << ' ' << 4 * mesh.num_faces() << '\n';
    for (const auto& t : mesh.triangles()) {
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    out << "POINT_DATA " << nv << '\n';
    out << "VECTORS velocity double\n";
    for (int v = 0; v < nv; ++v) {
        out << velocity.x[v] << ' ' << velocity.y[v] << ' ' << velocity.z[v] << '\n';
    }
    for (const auto& [name, field] : {std::pair{"pressure", &pressure}, std::pair{"vorticity", &vorticity}}) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int v = 0; v < nv; ++v) {
            out << (*field)[v] << '\n';
        }
    }
}

void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh, const VectorField3& velocity,
               const ScalarField& pressure, const ScalarField& vorticity)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_vtk(out, mesh, velocity, pressure, vorticity);
    if (!out) {
        throw Error("failed while writing " + path.string());
    }
}

VtkSummary check_vtk(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open " + path.string());
    }
    std::string line;
    std::getline(in, line);
    if (line.rfind("# vtk DataFile Version", 0) != 0) {
        throw LoadError(path.string() + ": missing VTK header");
    }
    std::getline(in, line); // title
    std::getline(in, line);
    if (line != "ASCII") {
        throw LoadError(path.string() + ": only ASCII files are supported");
    }
    expect_token(in, "DATASET", path);
    expect_token(in, "POLYDATA", path);

    VtkSummary s;
    expect_token(in, "POINTS", path);
    s.points = read_count(in, "point", path);
    expect_token(in, "double", path);
    read_values(in, 3L * s.points, "POINTS", path);

    expect_token(in, "POLYGONS", path);
    s.polygons = read_count(in, "polygon", path);
    const long size = read_count(in, "polygon list", path);
    long consumed = 0;
    for (int f = 0; f < s.polygons; ++f) {
        long k = 0;
        if (!(in >> k) || k < 3) {
            throw LoadError(path.string() + ": bad polygon " + std::to_string(f));
        }
        for (long j = 0; j < k; ++j) {
            long idx = -1;
            if (!(in >> idx) || idx < 0 || idx >= s.points) {
                throw LoadError(path.string() + ": polygon " + std::to_string(f) + " index out of range");
            }
        }
        consumed += k + 1;
    }
    if (consumed != size) {
        throw LoadError(path.string() + ": POLYGONS size " + std::to_string(size) + " does not match its entries (" +
                        std::to_string(consumed) + ")");
    }

    expect_token(in, "POINT_DATA", path);
    if (read_count(in, "point data", path) != s.points) {
        throw LoadError(path.string() + ": POINT_DATA count differs from POINTS");
    }
    std::string kind;
    while (in >> kind) {
        std::string name;
        std::string type;
        in >> name >> type;
        if (kind == "VECTORS") {
            read_values(in, 3L * s.points, name, path);
        } else if (kind == "SCALARS") {
            std::string comps;
            in >> comps;
            expect_token(in, "LOOKUP_TABLE", path);
            std::string table;
            in >> table;
            read_values(in, s.points, name, path);
        } else {
            throw LoadError(path.string() + ": unexpected section " + kind);
        }
        s.arrays.push_back(name);
    }
    return s;
}

std::string diagnostics_row(const DiagnosticsRecord& r)
{
    std::ostringstream out;
    out.precision(12);
    out << r.t << ',';
    out.precision(std::numeric_limits<double>::max_digits10);
    out << r.energy << ',' << r.h1 << ',' << r.normal_norm << ',' << r.div_norm << ',';
    if (r.defects_analyzed) {
        out << r.defects.size() << ',' << r.index_sum;
    } else {
        out << ',';
    }
    return out.str();
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int k = 0; k < length; ++k) {
        out << std::setw(2) << static_cast<int>(digest[k]);
    }
    return out.str();
}

std::string mesh_hash(const SurfaceMesh& mesh)
{
    std::ostringstream off;
    write_off(mesh, off);
    return sha256_hex(off.str());
}

nlohmann::json config_json(const RunConfig& config)
{
    const auto& m = config.mesh;
    const auto& s = config.sim;
    nlohmann::json mesh{{"type", to_string(m.kind)}};
    switch (m.kind) {
    case MeshSpec::Kind::Torus:
        mesh.update({{"major_radius", m.major_radius},
                     {"minor_radius", m.minor_radius},
                     {"axis", axis_name(m.axis)},
                     {"n_major", m.n_major},
                     {"n_minor", m.n_minor}});
        break;
    case MeshSpec::Kind::NTorus: {
        nlohmann::json mids = nlohmann::json::array();
        for (const auto& p : m.midpoints) {
            mids.push_back({p.x(), p.y(), p.z()});
        }
        mesh.update({{"major_radius", m.major_radius},
                     {"minor_radius", m.minor_radius},
                     {"axis", axis_name(m.axis)},
                     {"midpoints", mids},
                     {"delta", m.delta},
                     {"resolution", m.resolution},
                     {"smoothing", m.smoothing}});
        break;
    }
    case MeshSpec::Kind::Sphere:
        mesh.update({{"radius", m.radius}, {"subdivisions", m.subdivisions}});
        break;
    case MeshSpec::Kind::File:
        mesh["path"] = m.path.string();
        break;
    }
    nlohmann::json sim{{"Re", s.Re},
                       {"tau", s.tau},
                       {"alpha", s.alpha},
                       {"t_end", s.t_end},
                       {"formulation", to_string(s.formulation)},
                       {"krylov_tol", s.krylov_tol},
                       {"krylov_max_iter", s.krylov_max_iter},
                       {"defects_every", s.defects_every},
                       {"analytic_geometry", config.analytic_geometry}};
    nlohmann::json initial{{"condition", to_string(s.initial_condition)}};
    if (s.initial_condition == InitialCondition::FromFile) {
        initial["path"] = s.initial_path;
    }
    nlohmann::json out{{"mesh", mesh},
                       {"simulation", sim},
                       {"initial", initial},
                       {"output", {{"directory", config.output_dir.string()}, {"every", s.output_every}}}};
    if (!config.alphas.empty()) {
        out["sweep"] = {{"alphas", config.alphas}};
    }
    return out;
}

nlohmann::json manifest(const std::string& command, const MeshSpec& spec, const SurfaceMesh& mesh)
{
    nlohmann::json provenance{{"kind", to_string(spec.kind)}};
    if (spec.kind == MeshSpec::Kind::File) {
        provenance["path"] = spec.path.string();
    }
    return {{"command", command},
            {"version", kVersion},
            {"mesh",
             {{"provenance", provenance},
              {"sha256", mesh_hash(mesh)},
              {"vertices", mesh.num_vertices()},
              {"faces", mesh.num_faces()},
              {"euler_characteristic", mesh.euler_characteristic()},
              {"genus", mesh.genus()}}},
            {"wall_time_s", nlohmann::json::object()}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

} // namespace sns::cli
