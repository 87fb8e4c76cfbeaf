#pragma once

#include "sns/cli/config.hpp"
#include "sns/diagnostics.hpp"
#include "sns/fields.hpp"
#include "sns/mesh.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace sns::cli {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr const char* kDiagnosticsHeader = "t,E,h1,normal_norm,div_norm,n_defects,index_sum";
inline constexpr const char* kSweepHeader = "alpha,error,normal_norm_accum";
inline constexpr const char* kBenchHeader = "dofs,t_rotrot,t_graddiv,ratio";

/// Legacy ASCII VTK polydata: POINTS, POLYGONS, POINT_DATA with VECTORS
/// velocity and SCALARS pressure and vorticity.
void write_vtk(std::ostream& out, const SurfaceMesh& mesh, const VectorField3& velocity, const ScalarField& pressure,
               const ScalarField& vorticity);
void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh, const VectorField3& velocity,
               const ScalarField& pressure, const ScalarField& vorticity);

struct VtkSummary {
    int points = 0;
    int polygons = 0;
    std::vector<std::string> arrays;
};

/// Structural check of a file written by write_vtk: section counts agree,
/// every index is in range, every value parses. Throws LoadError.
[[nodiscard]] VtkSummary check_vtk(const std::filesystem::path& path);

/// One CSV row under kDiagnosticsHeader. n_defects and index_sum are empty
/// when detection was skipped.
[[nodiscard]] std::string diagnostics_row(const DiagnosticsRecord& r);

/// Lower-case hex SHA-256 of a byte string.
[[nodiscard]] std::string sha256_hex(const std::string& bytes);

/// SHA-256 of the mesh's OFF text.
[[nodiscard]] std::string mesh_hash(const SurfaceMesh& mesh);

[[nodiscard]] nlohmann::json config_json(const RunConfig& config);

/// Manifest skeleton: command, version, mesh provenance and hash.
[[nodiscard]] nlohmann::json manifest(const std::string& command, const MeshSpec& spec, const SurfaceMesh& mesh);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace sns::cli
