#pragma once

#include "sns/geometry.hpp"
#include "sns/levelset.hpp"
#include "sns/mesh.hpp"
#include "sns/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sns::cli {

struct MeshSpec {
    enum class Kind { Torus, NTorus, Sphere, File };
    Kind kind = Kind::Torus;
    // torus and n-torus
    double major_radius = 2.0;
    double minor_radius = 0.5;
    Axis axis = Axis::Y;
    int n_major = 128;
    int n_minor = 32;
    // n-torus
    std::vector<Vec3> midpoints{Vec3::Zero()};
    double delta = 0.0;
    int resolution = 64;
    int smoothing = 3;
    // sphere
    double radius = 1.0;
    int subdivisions = 3;
    // file
    std::filesystem::path path;

    [[nodiscard]] LevelSetNTorus levelset() const;
};

struct RunConfig {
    MeshSpec mesh;
    SimConfig sim;
    /// Analytic curvature and normals from the generator geometry.
    bool analytic_geometry = true;
    std::filesystem::path output_dir = "output";
    std::vector<double> alphas;
};

/// Parses INI-style text: `key = value` lines grouped in [mesh], [simulation],
/// [initial], [output] and [sweep] sections. Relative paths are resolved
/// against base_dir. Throws ConfigError on unknown keys or bad values.
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

[[nodiscard]] SurfaceMesh build_mesh(const MeshSpec& spec);

/// Curvature source matching the mesh geometry.
[[nodiscard]] CurvatureSource curvature_source(const MeshSpec& spec, bool analytic);

/// "x y z; x y z; ..." (commas also accepted as separators inside a point).
[[nodiscard]] std::vector<Vec3> parse_points(const std::string& text);

/// Comma or whitespace separated numbers.
[[nodiscard]] std::vector<double> parse_numbers(const std::string& text);

[[nodiscard]] std::string to_string(Formulation f);
[[nodiscard]] std::string to_string(InitialCondition c);
[[nodiscard]] std::string to_string(MeshSpec::Kind k);

} // namespace sns::cli
