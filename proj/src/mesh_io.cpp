#include "sns/mesh_io.hpp"

#include "sns/errors.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace sns {

namespace {

// Next non-empty line with comments ('#') stripped.
bool next_content_line(std::istream& in, std::string& line, int& line_no)
{
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            return true;
        }
    }
    return false;
}

} // namespace

SurfaceMesh load_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open mesh file " + path.string());
    }
    const std::string where = path.string() + ": ";
    std::string line;
    int line_no = 0;
    if (!next_content_line(in, line, line_no)) {
        throw LoadError(where + "empty file");
    }
    std::istringstream header(line);
    std::string magic;
    header >> magic;
    if (magic != "OFF") {
        throw LoadError(where + "missing OFF header");
    }
    // Counts may share the header line.
    long nv = -1;
    long nf = -1;
    long ne = 0;
    if (!(header >> nv >> nf)) {
        if (!next_content_line(in, line, line_no)) {
            throw LoadError(where + "missing counts line");
        }
        std::istringstream counts(line);
        if (!(counts >> nv >> nf)) {
            throw LoadError(where + "malformed counts line " + std::to_string(line_no));
        }
        counts >> ne;
    }
    if (nv <= 0 || nf <= 0) {
        throw LoadError(where + "vertex and face counts must be positive");
    }

    std::vector<Vec3> vertices(static_cast<std::size_t>(nv));
    for (long v = 0; v < nv; ++v) {
        if (!next_content_line(in, line, line_no)) {
            throw LoadError(where + "unexpected end of file in vertex " + std::to_string(v));
        }
        std::istringstream row(line);
        if (!(row >> vertices[v].x() >> vertices[v].y() >> vertices[v].z())) {
            throw LoadError(where + "malformed vertex " + std::to_string(v) + " on line " +
                            std::to_string(line_no));
        }
    }
    std::vector<Triangle> triangles(static_cast<std::size_t>(nf));
    for (long f = 0; f < nf; ++f) {
        if (!next_content_line(in, line, line_no)) {
            throw LoadError(where + "unexpected end of file in face " + std::to_string(f));
        }
        std::istringstream row(line);
        int count = 0;
        if (!(row >> count) || count != 3) {
            throw LoadError(where + "face " + std::to_string(f) + " on line " + std::to_string(line_no) +
                            " is not a triangle");
        }
        auto& t = triangles[f];
        if (!(row >> t[0] >> t[1] >> t[2])) {
            throw LoadError(where + "malformed face " + std::to_string(f) + " on line " +
                            std::to_string(line_no));
        }
    }

    try {
        return SurfaceMesh(std::move(vertices), std::move(triangles));
    } catch (const TopologyError& e) {
        throw LoadError(where + e.what());
    }
}

void write_off(const SurfaceMesh& mesh, std::ostream& out)
{
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << ' ' << mesh.num_edges() << '\n';
    for (const auto& p : mesh.vertices()) {
        out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    for (const auto& t : mesh.triangles()) {
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
}

void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write mesh file " + path.string());
    }
    write_off(mesh, out);
    if (!out) {
        throw Error("failed while writing " + path.string());
    }
}

} // namespace sns
