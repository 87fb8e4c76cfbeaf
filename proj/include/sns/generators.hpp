#pragma once

#include "sns/levelset.hpp"
#include "sns/mesh.hpp"

namespace sns {

/// Structured quad-split torus with n_major * n_minor vertices on the zero set
/// of the torus level set (tube around `axis`, centred at the origin), with
/// outward orientation.
[[nodiscard]] SurfaceMesh generate_torus(double major_radius, double minor_radius, int n_major,
                                         int n_minor, Axis axis = Axis::Y);

/// Subdivided icosahedron projected to a sphere; level 0 is the icosahedron.
[[nodiscard]] SurfaceMesh generate_icosphere(double radius, int subdivisions);

/// Surface of the cube [-1,1]^3 with n x n quads split into triangles per side.
[[nodiscard]] SurfaceMesh generate_cube_surface(int n);

/// The single-torus level set matching generate_torus.
[[nodiscard]] LevelSetNTorus torus_levelset(double major_radius, double minor_radius,
                                            Axis axis = Axis::Y);

} // namespace sns
