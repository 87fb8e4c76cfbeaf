#pragma once

#include "sns/mesh.hpp"

#include <Eigen/Core>

#include <vector>

namespace sns {

/// Coordinate axis a torus tube circles around.
enum class Axis { X, Y, Z };

[[nodiscard]] Vec3 axis_vector(Axis axis);

/// Implicit genus-n surface L(x) = prod_i T(x - m_i) - (n - 1) delta, where T
/// is the quartic torus function with major radius R and minor radius r:
///
///     T(x) = (|x|^2 + R^2 - r^2)^2 - 4 R^2 (|x|^2 - (x . a)^2)
///
/// With the default axis a = e_y this is (|x|^2 + R^2 - r^2)^2 - 4R^2(x^2 + z^2).
struct LevelSetNTorus {
    std::vector<Vec3> midpoints{Vec3::Zero()};
    double major_radius = 2.0;
    double minor_radius = 0.5;
    double delta = 0.0;
    Axis axis = Axis::Y;

    [[nodiscard]] int genus() const { return static_cast<int>(midpoints.size()); }
    /// Throws ParameterError unless R > r > 0 and (n >= 2 implies delta > 0).
    void validate() const;
};

struct LevelSetSample {
    double value = 0.0;
    Vec3 gradient = Vec3::Zero();
};

/// L(x) and its analytic gradient.
[[nodiscard]] LevelSetSample eval_levelset(const LevelSetNTorus& ls, const Vec3& x);

/// Analytic Hessian of L at x.
[[nodiscard]] Eigen::Matrix3d levelset_hessian(const LevelSetNTorus& ls, const Vec3& x);

/// Gaussian curvature of the zero level set through x (Goldman's formula).
[[nodiscard]] double levelset_gaussian_curvature(const LevelSetNTorus& ls, const Vec3& x);

/// Newton projection of x onto L = 0 along the gradient. Iterates until the
/// first-order distance |L| / |grad L| falls below tol.
[[nodiscard]] Vec3 project_to_levelset(const LevelSetNTorus& ls, const Vec3& x, double tol = 1e-13);

struct ExtractionOptions {
    /// Tangential Laplacian smoothing passes, each followed by re-projection.
    int smoothing_passes = 3;
    double smoothing_weight = 0.5;
};

/// Marching-tetrahedra extraction of the zero set on a regular grid spanning
/// the bounding box of the tori, followed by Newton projection and tangential
/// smoothing. `grid_resolution` is the number of cells along the longest box
/// side. Throws ExtractionError when the result is not a connected closed
/// manifold of genus n.
[[nodiscard]] SurfaceMesh extract_levelset_mesh(const LevelSetNTorus& ls, int grid_resolution,
                                                const ExtractionOptions& options = {});

} // namespace sns
