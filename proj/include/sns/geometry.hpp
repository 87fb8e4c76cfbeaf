#pragma once

#include "sns/levelset.hpp"
#include "sns/mesh.hpp"

#include <Eigen/Core>

#include <vector>

namespace sns {

using ScalarField = Eigen::VectorXd;

/// Where the Gaussian curvature used by the solver comes from.
struct CurvatureSource {
    enum class Mode {
        AnalyticTorus,       ///< closed form for a single torus centred at the origin
        AnalyticLevelSet,    ///< implicit-surface curvature of `levelset`
        DiscreteAngleDefect, ///< angle defect over lumped vertex area
    };
    Mode mode = Mode::DiscreteAngleDefect;
    double major_radius = 2.0;
    double minor_radius = 0.5;
    Axis axis = Axis::Y;
    LevelSetNTorus levelset;
};

/// Angle-weighted average of incident face normals, normalised.
[[nodiscard]] std::vector<Vec3> vertex_normals(const SurfaceMesh& mesh);

/// Analytic normals grad L / |grad L|. Throws GeometryError on a vanishing gradient.
[[nodiscard]] std::vector<Vec3> vertex_normals(const SurfaceMesh& mesh, const LevelSetNTorus& ls);

/// 2 pi minus the sum of incident corner angles, per vertex (not area-normalised).
[[nodiscard]] ScalarField angle_defects(const SurfaceMesh& mesh);

/// Per-vertex Gaussian curvature from the selected source.
[[nodiscard]] ScalarField gaussian_curvature(const SurfaceMesh& mesh, const CurvatureSource& source);

/// Closed-form torus curvature (rho - R) / (r^2 rho), rho the distance from the axis.
[[nodiscard]] double torus_gaussian_curvature(const Vec3& x, double major_radius, double minor_radius,
                                              Axis axis = Axis::Y);

/// Discrete mean curvature (sum of principal curvatures; sphere of radius a has
/// H = 2/a) from the cotangent Laplacian of the positions.
[[nodiscard]] ScalarField mean_curvature(const SurfaceMesh& mesh);

} // namespace sns
