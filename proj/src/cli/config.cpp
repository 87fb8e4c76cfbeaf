#include "sns/cli/config.hpp"

#include "sns/errors.hpp"
#include "sns/generators.hpp"
#include "sns/mesh_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace sns::cli {

namespace {

namespace pt = boost::property_tree;

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    if (used != value.size()) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return x;
}

int to_int(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    long x = 0;
    try {
        x = std::stol(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    if (used != value.size() || x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& value)
{
    const auto v = lower(value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") {
        return true;
    }
    if (v == "false" || v == "no" || v == "0" || v == "off") {
        return false;
    }
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

Axis to_axis(const std::string& key, const std::string& value)
{
    const auto v = lower(value);
    if (v == "x") {
        return Axis::X;
    }
    if (v == "y") {
        return Axis::Y;
    }
    if (v == "z") {
        return Axis::Z;
    }
    throw ConfigError(key + ": axis must be x, y or z");
}

// Flattened "section.key" -> value, rejecting duplicates.
std::map<std::string, std::string> flatten(const pt::ptree& tree)
{
    std::map<std::string, std::string> out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("key '" + section + "' must belong to a section");
        }
        for (const auto& [key, value] : body) {
            const std::string full = lower(section) + "." + lower(key);
            if (!out.emplace(full, trim(value.data())).second) {
                throw ConfigError("duplicate key " + full);
            }
        }
    }
    return out;
}

} // namespace

LevelSetNTorus MeshSpec::levelset() const
{
    LevelSetNTorus ls;
    ls.midpoints = midpoints;
    ls.major_radius = major_radius;
    ls.minor_radius = minor_radius;
    ls.delta = delta;
    ls.axis = axis;
    return ls;
}

std::vector<double> parse_numbers(const std::string& text)
{
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        out.push_back(to_double("number list", token));
    }
    return out;
}

std::vector<Vec3> parse_points(const std::string& text)
{
    std::vector<Vec3> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (trim(item).empty()) {
            continue;
        }
        const auto xs = parse_numbers(item);
        if (xs.size() != 3) {
            throw ConfigError("point '" + trim(item) + "' needs three coordinates");
        }
        out.emplace_back(xs[0], xs[1], xs[2]);
    }
    if (out.empty()) {
        throw ConfigError("point list is empty");
    }
    return out;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    const auto entries = flatten(tree);

    RunConfig c;
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    bool mesh_axis_set = false;
    for (const auto& [key, value] : entries) {
        auto& m = c.mesh;
        auto& s = c.sim;
        if (key == "mesh.type") {
            const auto v = lower(value);
            if (v == "torus") {
                m.kind = MeshSpec::Kind::Torus;
            } else if (v == "ntorus") {
                m.kind = MeshSpec::Kind::NTorus;
            } else if (v == "sphere") {
                m.kind = MeshSpec::Kind::Sphere;
            } else if (v == "file") {
                m.kind = MeshSpec::Kind::File;
            } else {
                throw ConfigError("mesh.type must be torus, ntorus, sphere or file");
            }
        } else if (key == "mesh.r_major" || key == "mesh.major_radius") {
            m.major_radius = to_double(key, value);
        } else if (key == "mesh.r_minor" || key == "mesh.minor_radius") {
            m.minor_radius = to_double(key, value);
        } else if (key == "mesh.axis") {
            m.axis = to_axis(key, value);
            mesh_axis_set = true;
        } else if (key == "mesh.n_major") {
            m.n_major = to_int(key, value);
        } else if (key == "mesh.n_minor") {
            m.n_minor = to_int(key, value);
        } else if (key == "mesh.midpoints") {
            m.midpoints = parse_points(value);
        } else if (key == "mesh.delta") {
            m.delta = to_double(key, value);
        } else if (key == "mesh.resolution") {
            m.resolution = to_int(key, value);
        } else if (key == "mesh.smoothing") {
            m.smoothing = to_int(key, value);
        } else if (key == "mesh.radius") {
            m.radius = to_double(key, value);
        } else if (key == "mesh.subdivisions") {
            m.subdivisions = to_int(key, value);
        } else if (key == "mesh.path") {
            m.path = resolve(value);
        } else if (key == "simulation.re") {
            s.Re = to_double(key, value);
        } else if (key == "simulation.tau") {
            s.tau = to_double(key, value);
        } else if (key == "simulation.alpha") {
            s.alpha = to_double(key, value);
        } else if (key == "simulation.t_end") {
            s.t_end = to_double(key, value);
        } else if (key == "simulation.formulation") {
            const auto v = lower(value);
            if (v == "rotated" || v == "graddiv") {
                s.formulation = Formulation::Problem2;
            } else if (v == "unrotated" || v == "rotrot") {
                s.formulation = Formulation::Problem1;
            } else {
                throw ConfigError("simulation.formulation must be rotated or unrotated");
            }
        } else if (key == "simulation.krylov_tol") {
            s.krylov_tol = to_double(key, value);
        } else if (key == "simulation.krylov_max_iter") {
            s.krylov_max_iter = to_int(key, value);
        } else if (key == "simulation.defects_every") {
            s.defects_every = to_int(key, value);
        } else if (key == "simulation.analytic_geometry") {
            c.analytic_geometry = to_bool(key, value);
        } else if (key == "initial.condition") {
            const auto v = lower(value);
            if (v == "harmonic_mean") {
                s.initial_condition = InitialCondition::HarmonicMean;
            } else if (v == "rot_stream") {
                s.initial_condition = InitialCondition::RotStream;
            } else if (v == "killing") {
                s.initial_condition = InitialCondition::Killing;
            } else if (v == "file") {
                s.initial_condition = InitialCondition::FromFile;
            } else {
                throw ConfigError("initial.condition must be harmonic_mean, rot_stream, killing or file");
            }
        } else if (key == "initial.path") {
            s.initial_path = resolve(value).string();
        } else if (key == "output.directory") {
            c.output_dir = resolve(value);
        } else if (key == "output.every") {
            s.output_every = to_int(key, value);
        } else if (key == "sweep.alphas") {
            c.alphas = parse_numbers(value);
        } else {
            throw ConfigError("unknown config key " + key);
        }
    }
    if (c.mesh.kind == MeshSpec::Kind::NTorus && !mesh_axis_set) {
        c.mesh.axis = Axis::Z;
    }
    if (c.mesh.kind == MeshSpec::Kind::File && c.mesh.path.empty()) {
        throw ConfigError("mesh.type = file needs mesh.path");
    }
    if (c.mesh.kind == MeshSpec::Kind::File && c.analytic_geometry) {
        throw ConfigError("a mesh file has no analytic geometry; set simulation.analytic_geometry = false");
    }
    c.sim.curvature = curvature_source(c.mesh, c.analytic_geometry);
    c.sim.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

SurfaceMesh build_mesh(const MeshSpec& spec)
{
    switch (spec.kind) {
    case MeshSpec::Kind::Torus:
        return generate_torus(spec.major_radius, spec.minor_radius, spec.n_major, spec.n_minor, spec.axis);
    case MeshSpec::Kind::NTorus: {
        ExtractionOptions options;
        options.smoothing_passes = spec.smoothing;
        return extract_levelset_mesh(spec.levelset(), spec.resolution, options);
    }
    case MeshSpec::Kind::Sphere:
        return generate_icosphere(spec.radius, spec.subdivisions);
    case MeshSpec::Kind::File:
        return load_mesh(spec.path);
    }
    throw ConfigError("unknown mesh kind");
}

CurvatureSource curvature_source(const MeshSpec& spec, bool analytic)
{
    CurvatureSource source;
    source.major_radius = spec.major_radius;
    source.minor_radius = spec.minor_radius;
    source.axis = spec.axis;
    if (!analytic || spec.kind == MeshSpec::Kind::Sphere || spec.kind == MeshSpec::Kind::File) {
        source.mode = CurvatureSource::Mode::DiscreteAngleDefect;
    } else if (spec.kind == MeshSpec::Kind::Torus) {
        source.mode = CurvatureSource::Mode::AnalyticTorus;
    } else {
        source.mode = CurvatureSource::Mode::AnalyticLevelSet;
        source.levelset = spec.levelset();
    }
    return source;
}

std::string to_string(Formulation f)
{
    return f == Formulation::Problem2 ? "rotated" : "unrotated";
}

std::string to_string(InitialCondition c)
{
    switch (c) {
    case InitialCondition::HarmonicMean:
        return "harmonic_mean";
    case InitialCondition::RotStream:
        return "rot_stream";
    case InitialCondition::Killing:
        return "killing";
    case InitialCondition::FromFile:
        return "file";
    }
    return "unknown";
}

std::string to_string(MeshSpec::Kind k)
{
    switch (k) {
    case MeshSpec::Kind::Torus:
        return "torus";
    case MeshSpec::Kind::NTorus:
        return "ntorus";
    case MeshSpec::Kind::Sphere:
        return "sphere";
    case MeshSpec::Kind::File:
        return "file";
    }
    return "unknown";
}

} // namespace sns::cli
