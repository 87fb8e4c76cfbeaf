#pragma once

#include "sns/mesh.hpp"

#include <filesystem>
#include <ostream>

namespace sns {

/// Reads an ASCII OFF triangle mesh and validates every SurfaceMesh invariant.
/// Throws LoadError naming the offending element.
[[nodiscard]] SurfaceMesh load_mesh(const std::filesystem::path& path);

/// OFF text of the mesh; the bytes save_mesh writes.
void write_off(const SurfaceMesh& mesh, std::ostream& out);

/// Writes an ASCII OFF file with round-trip exact (max_digits10) coordinates.
void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path);

} // namespace sns
