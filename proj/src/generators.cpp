#include "sns/generators.hpp"

#include "sns/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <numbers>

namespace sns {

namespace {

// Orthonormal in-plane directions for the tube circle around `axis`.
std::pair<Vec3, Vec3> plane_basis(Axis axis)
{
    switch (axis) {
    case Axis::X:
        return {Vec3::UnitY(), Vec3::UnitZ()};
    case Axis::Y:
        return {Vec3::UnitX(), Vec3::UnitZ()};
    case Axis::Z:
        return {Vec3::UnitX(), Vec3::UnitY()};
    }
    return {Vec3::UnitX(), Vec3::UnitZ()};
}

// Flips every face when the first one points against `outward`.
void orient_outward(std::vector<Triangle>& triangles, const std::vector<Vec3>& vertices, const Vec3& outward)
{
    const auto& t = triangles.front();
    const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    if (n.dot(outward) < 0.0) {
        for (auto& tri : triangles) {
            std::swap(tri[1], tri[2]);
        }
    }
}

} // namespace

LevelSetNTorus torus_levelset(double major_radius, double minor_radius, Axis axis)
{
    LevelSetNTorus ls;
    ls.midpoints = {Vec3::Zero()};
    ls.major_radius = major_radius;
    ls.minor_radius = minor_radius;
    ls.delta = 0.0;
    ls.axis = axis;
    return ls;
}

SurfaceMesh generate_torus(double major_radius, double minor_radius, int n_major, int n_minor, Axis axis)
{
    if (n_major < 3 || n_minor < 3) {
        throw ParameterError("torus resolution must be at least 3 x 3");
    }
    if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
        throw ParameterError("torus radii must satisfy R > r > 0");
    }
    const auto [e1, e2] = plane_basis(axis);
    const Vec3 a = axis_vector(axis);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<std::size_t>(n_major) * n_minor);
    for (int i = 0; i < n_major; ++i) {
        const double phi = two_pi * i / n_major;
        for (int j = 0; j < n_minor; ++j) {
            const double theta = two_pi * j / n_minor;
            const double rho = major_radius + minor_radius * std::cos(theta);
            vertices.push_back(rho * (std::cos(phi) * e1 + std::sin(phi) * e2) +
                               minor_radius * std::sin(theta) * a);
        }
    }
    auto id = [&](int i, int j) { return ((i + n_major) % n_major) * n_minor + (j + n_minor) % n_minor; };

    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<std::size_t>(2) * n_major * n_minor);
    for (int i = 0; i < n_major; ++i) {
        for (int j = 0; j < n_minor; ++j) {
            triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    }
    // Vertex (0, 0) sits on the outer equator, where the outward normal is e1.
    orient_outward(triangles, vertices, e1);
    return SurfaceMesh(std::move(vertices), std::move(triangles));
}

SurfaceMesh generate_icosphere(double radius, int subdivisions)
{
    if (subdivisions < 0) {
        throw ParameterError("subdivision level must be non-negative");
    }
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    for (auto& v : vertices) {
        v.normalize();
    }
    std::vector<Triangle> triangles = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) {
                return it->second;
            }
            vertices.push_back((vertices[a] + vertices[b]).normalized());
            const int id = static_cast<int>(vertices.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<Triangle> next;
        next.reserve(triangles.size() * 4);
        for (const auto& tri : triangles) {
            const int ab = mid(tri[0], tri[1]);
            const int bc = mid(tri[1], tri[2]);
            const int ca = mid(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        triangles = std::move(next);
    }
    for (auto& v : vertices) {
        v *= radius;
    }
    orient_outward(triangles, vertices, vertices[triangles.front()[0]]);
    return SurfaceMesh(std::move(vertices), std::move(triangles));
}

SurfaceMesh generate_cube_surface(int n)
{
    if (n < 1) {
        throw ParameterError("cube resolution must be positive");
    }
    std::map<std::array<int, 3>, int> lattice;
    std::vector<Vec3> vertices;
    auto vertex = [&](const std::array<int, 3>& ijk) {
        auto it = lattice.find(ijk);
        if (it != lattice.end()) {
            return it->second;
        }
        vertices.emplace_back(-1.0 + 2.0 * ijk[0] / n, -1.0 + 2.0 * ijk[1] / n, -1.0 + 2.0 * ijk[2] / n);
        const int id = static_cast<int>(vertices.size()) - 1;
        lattice.emplace(ijk, id);
        return id;
    };

    std::vector<Triangle> triangles;
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side <= 1; ++side) {
            const int u_axis = (axis + 1) % 3;
            const int v_axis = (axis + 2) % 3;
            Vec3 outward = Vec3::Zero();
            outward[axis] = side == 0 ? -1.0 : 1.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    auto at = [&](int u, int v) {
                        std::array<int, 3> ijk{};
                        ijk[axis] = side * n;
                        ijk[u_axis] = u;
                        ijk[v_axis] = v;
                        return vertex(ijk);
                    };
                    const int a = at(i, j);
                    const int b = at(i + 1, j);
                    const int c = at(i + 1, j + 1);
                    const int d = at(i, j + 1);
                    for (Triangle tri : {Triangle{a, b, c}, Triangle{a, c, d}}) {
                        const Vec3 nrm = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
                        if (nrm.dot(outward) < 0.0) {
                            std::swap(tri[1], tri[2]);
                        }
                        triangles.push_back(tri);
                    }
                }
            }
        }
    }
    return SurfaceMesh(std::move(vertices), std::move(triangles));
}

} // namespace sns
