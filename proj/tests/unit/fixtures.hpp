#pragma once

#include "sns/fields.hpp"
#include "sns/generators.hpp"
#include "sns/geometry.hpp"
#include "sns/mesh.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>

namespace sns::testing {

struct TorusFixture {
    double R = 2.0;
    double r = 0.5;
    SurfaceMesh mesh;
    std::vector<Vec3> normals;

    TorusFixture(int n_major, int n_minor, double major = 2.0, double minor = 0.5)
        : R(major), r(minor), mesh(generate_torus(major, minor, n_major, n_minor)),
          normals(vertex_normals(mesh, torus_levelset(major, minor)))
    {
    }
};

/// d_phi x = (-z, 0, x) on the y-axis torus.
inline VectorField3 killing_field(const SurfaceMesh& mesh)
{
    VectorField3 f(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3& p = mesh.position(v);
        f.set(v, Vec3(-p.z(), 0.0, p.x()));
    }
    return f;
}

/// Smooth random ambient field projected onto the tangent planes.
inline VectorField3 smooth_tangent_field(const SurfaceMesh& mesh, const std::vector<Vec3>& normals, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::Matrix3d a;
    Eigen::Matrix3d b;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            a(i, j) = u(rng);
            b(i, j) = u(rng);
        }
    }
    const Vec3 c(u(rng), u(rng), u(rng));
    VectorField3 f(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3& p = mesh.position(v);
        Vec3 amb = c + a * p;
        for (int i = 0; i < 3; ++i) {
            amb[i] += std::sin(b.row(i).dot(p));
        }
        const Vec3& n = normals[v];
        f.set(v, amb - n * n.dot(amb));
    }
    return f;
}

inline VectorField3 random_field(int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    VectorField3 f(n);
    for (int v = 0; v < n; ++v) {
        f.set(v, Vec3(g(rng), g(rng), g(rng)));
    }
    return f;
}

inline double observed_order(double coarse_error, double fine_error, double coarse_h, double fine_h)
{
    return std::log(coarse_error / fine_error) / std::log(coarse_h / fine_h);
}

} // namespace sns::testing
