#include "sns/geometry.hpp"

#include "sns/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace sns {

std::vector<Vec3> vertex_normals(const SurfaceMesh& mesh)
{
    std::vector<Vec3> normals(mesh.num_vertices(), Vec3::Zero());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        for (int k = 0; k < 3; ++k) {
            normals[t[k]] += mesh.corner_angle(f, k) * mesh.face_normal(f);
        }
    }
    for (auto& n : normals) {
        n.normalize();
    }
    return normals;
}

std::vector<Vec3> vertex_normals(const SurfaceMesh& mesh, const LevelSetNTorus& ls)
{
    std::vector<Vec3> normals(mesh.num_vertices());
    double agreement = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3 g = eval_levelset(ls, mesh.position(v)).gradient;
        const double len = g.norm();
        if (!(len > 0.0)) {
            throw GeometryError("level-set gradient vanishes at vertex " + std::to_string(v));
        }
        normals[v] = g / len;
    }
    for (int f = 0; f < mesh.num_faces(); ++f) {
        for (int v : mesh.triangle(f)) {
            agreement += mesh.face_area(f) * normals[v].dot(mesh.face_normal(f));
        }
    }
    if (!(agreement > 0.0)) {
        throw GeometryError("analytic normals disagree with the mesh orientation");
    }
    return normals;
}

ScalarField angle_defects(const SurfaceMesh& mesh)
{
    ScalarField defect = ScalarField::Constant(mesh.num_vertices(), 2.0 * std::numbers::pi);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        for (int k = 0; k < 3; ++k) {
            defect[t[k]] -= mesh.corner_angle(f, k);
        }
    }
    return defect;
}

double torus_gaussian_curvature(const Vec3& x, double major_radius, double minor_radius, Axis axis)
{
    const Vec3 a = axis_vector(axis);
    const double rho = (x - x.dot(a) * a).norm();
    if (!(rho > 0.0)) {
        throw GeometryError("point on the torus axis: curvature undefined");
    }
    return (rho - major_radius) / (minor_radius * minor_radius * rho);
}

ScalarField gaussian_curvature(const SurfaceMesh& mesh, const CurvatureSource& source)
{
    using Mode = CurvatureSource::Mode;
    ScalarField kappa(mesh.num_vertices());
    switch (source.mode) {
    case Mode::AnalyticTorus:
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            kappa[v] = torus_gaussian_curvature(mesh.position(v), source.major_radius, source.minor_radius,
                                                source.axis);
        }
        break;
    case Mode::AnalyticLevelSet:
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            kappa[v] = levelset_gaussian_curvature(source.levelset, mesh.position(v));
        }
        break;
    case Mode::DiscreteAngleDefect:
        kappa = angle_defects(mesh).cwiseQuotient(mesh.vertex_areas());
        break;
    }
    return kappa;
}

namespace {

// Mixed Voronoi area: circumcentric cells on non-obtuse faces, fixed
// fractions of the face area otherwise.
ScalarField mixed_areas(const SurfaceMesh& mesh)
{
    constexpr double right = std::numbers::pi / 2.0;
    ScalarField area = ScalarField::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        const double a = mesh.face_area(f);
        int obtuse = -1;
        for (int k = 0; k < 3; ++k) {
            if (mesh.corner_angle(f, k) > right) {
                obtuse = k;
            }
        }
        if (obtuse >= 0) {
            for (int k = 0; k < 3; ++k) {
                area[t[k]] += k == obtuse ? 0.5 * a : 0.25 * a;
            }
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            const int i = t[(k + 1) % 3];
            const int j = t[(k + 2) % 3];
            const double part = (mesh.position(j) - mesh.position(i)).squaredNorm() / (8.0 * std::tan(mesh.corner_angle(f, k)));
            area[i] += part;
            area[j] += part;
        }
    }
    return area;
}

} // namespace

ScalarField mean_curvature(const SurfaceMesh& mesh)
{
    std::vector<Vec3> laplace(mesh.num_vertices(), Vec3::Zero());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& t = mesh.triangle(f);
        for (int k = 0; k < 3; ++k) {
            // The corner at k is opposite the edge (k+1, k+2).
            const int i = t[(k + 1) % 3];
            const int j = t[(k + 2) % 3];
            const double w = 0.5 / std::tan(mesh.corner_angle(f, k));
            const Vec3 d = mesh.position(j) - mesh.position(i);
            laplace[i] += w * d;
            laplace[j] -= w * d;
        }
    }
    const auto normals = vertex_normals(mesh);
    const auto area = mixed_areas(mesh);
    ScalarField h(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        h[v] = -laplace[v].dot(normals[v]) / area[v];
    }
    return h;
}

} // namespace sns
